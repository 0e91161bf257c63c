// Command-line front end: run experiments, trace a single annealing run,
// generate synthetic datasets, decompose a saved ensemble.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "falabel/falabel.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

int cmd_run(const std::string& config_path) {
  if (!std::filesystem::exists(config_path)) {
    std::cerr << "error: config file not found: " << config_path << "\n";
    return 1;
  }
  falabel::ExperimentConfig cfg = falabel::load_config(config_path);
  const falabel::ExperimentResult res = falabel::run_experiment(cfg);
  std::cout << "wrote " << res.records.size() << " run records to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_trace(const std::string& data_path, const std::string& label_column, std::size_t L,
              std::uint64_t seed, const std::string& out_path, const std::string& init_mode) {
  falabel::Dataset d = falabel::load_csv(data_path, label_column);
  falabel::BuildConfig build;
  build.init_mode = falabel::parse_init_mode(init_mode);
  std::vector<falabel::AnnealTraceRow> trace;
  falabel::build_false_label_ensemble(d, L, build, seed, &trace);
  falabel::save_trace_csv(trace, out_path);
  std::cout << "wrote " << trace.size() << " trace rows to " << out_path << "\n";
  return 0;
}

int cmd_synth(double sep, std::size_t dims, std::size_t count, std::uint64_t seed,
              const std::string& out_path) {
  const falabel::Dataset d = falabel::generate_synthetic(sep, dims, count, seed);
  falabel::save_csv(d, out_path);
  std::cout << "wrote " << d.size() << " instances to " << out_path << "\n";
  return 0;
}

int cmd_decompose(const std::string& ensemble_path, const std::string& data_path,
                  const std::string& label_column) {
  std::ifstream in(ensemble_path);
  if (!in) {
    std::cerr << "error: cannot open ensemble file: " << ensemble_path << "\n";
    return 2;
  }
  nlohmann::json j;
  in >> j;
  const falabel::FalseLabelEnsemble e = falabel::ensemble_from_json(j);
  const falabel::Dataset d = falabel::load_csv(data_path, label_column);
  const falabel::DecompositionReport rep = falabel::decompose(falabel::vote_profiles(e, d));
  std::cout << "mean_individual_loss,good_diversity,bad_diversity,ensemble_loss\n";
  std::cout << rep.mean_individual_loss << "," << rep.good_diversity << ","
            << rep.bad_diversity << "," << rep.ensemble_loss << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False-labelling ensemble builder and experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "JSON config file")->required();

  std::string trace_data, trace_label = "label", trace_out = "trace.csv",
              trace_init = "ALL_NEGATIVE";
  std::size_t trace_size = 5;
  std::uint64_t trace_seed = 0;
  auto* trace = app.add_subcommand("trace", "Single annealing run, emits a per-iteration CSV");
  trace->add_option("--data", trace_data, "Dataset CSV")->required();
  trace->add_option("--label-column", trace_label, "Label column name");
  trace->add_option("--size", trace_size, "Ensemble size L (odd, >= 3)");
  trace->add_option("--seed", trace_seed, "Seed");
  trace->add_option("--init", trace_init, "Init mode: ALL_NEGATIVE, COPY_ORIG, RANDOM");
  trace->add_option("--out", trace_out, "Output CSV path");

  double synth_sep = 4.0;
  std::size_t synth_dims = 10, synth_count = 200;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "synthetic.csv";
  auto* synth = app.add_subcommand("synth", "Write a synthetic two-cluster CSV dataset");
  synth->add_option("--sep", synth_sep, "Class mean separation");
  synth->add_option("--dims", synth_dims, "Feature count");
  synth->add_option("--count", synth_count, "Instance count");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--out", synth_out, "Output CSV path");

  std::string dec_ensemble, dec_data, dec_label = "label";
  auto* dec = app.add_subcommand("decompose", "Diversity decomposition of a saved ensemble");
  dec->add_option("--ensemble", dec_ensemble, "Ensemble JSON file")->required();
  dec->add_option("--data", dec_data, "Dataset CSV")->required();
  dec->add_option("--label-column", dec_label, "Label column name");

  auto* version = app.add_subcommand("version", "Print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*trace) return cmd_trace(trace_data, trace_label, trace_size, trace_seed, trace_out,
                                 trace_init);
    if (*synth) return cmd_synth(synth_sep, synth_dims, synth_count, synth_seed, synth_out);
    if (*dec) return cmd_decompose(dec_ensemble, dec_data, dec_label);
    if (*version) {
      std::cout << "falabel " << kVersion << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
