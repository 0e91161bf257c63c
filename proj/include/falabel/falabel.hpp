#pragma once

#include "falabel/annealer.hpp"
#include "falabel/dataset.hpp"
#include "falabel/diversity.hpp"
#include "falabel/energy.hpp"
#include "falabel/ensemble.hpp"
#include "falabel/harness.hpp"
#include "falabel/naive_bayes.hpp"
#include "falabel/rng.hpp"
#include "falabel/stats.hpp"
#include "falabel/synthetic.hpp"
