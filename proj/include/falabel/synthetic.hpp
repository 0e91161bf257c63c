#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "falabel/dataset.hpp"
#include "falabel/rng.hpp"

namespace falabel {

// Box-Muller on the library's own uniform draw, for cross-platform
// reproducibility.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Two isotropic unit-variance Gaussian clusters at +-(sep/2)*(1,..,1)/sqrt(n),
// balanced classes (odd counts give the extra instance to +1).
inline Dataset generate_synthetic(double separation, std::size_t dims, std::size_t count,
                                  std::uint64_t seed, const std::string& name = "synthetic") {
  if (dims < 1 || count < 4 || separation < 0)
    throw std::invalid_argument("generate_synthetic: need dims >= 1, count >= 4, sep >= 0");
  Dataset d;
  d.name = name;
  d.feature_count = dims;
  Rng rng(seed);
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dims));
  const std::size_t positives = (count + 1) / 2;
  for (std::size_t i = 0; i < count; ++i) {
    const bool pos = i < positives;
    FeatureVector x(dims);
    for (double& v : x) v = standard_normal(rng) + (pos ? offset : -offset);
    d.push(std::move(x), pos ? Label::positive() : Label::negative());
  }
  return d;
}

}  // namespace falabel
