#pragma once

// Simulation oracle: compares closed-form block quantities with empirical
// frequencies at finite thresholds on samples drawn from the models.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockfi/core.hpp"
#include "blockfi/estimation.hpp"
#include "blockfi/fragility.hpp"
#include "blockfi/models.hpp"

namespace blockfi {

struct EmpiricalExceedance {
  ExceedanceDistribution distribution;
  double mean = 0.0;  // conditional mean of N given N > 0
  std::size_t rows_with_exceedance = 0;
  double u = 0.0;
};

/// Block j exceeds in a row when some member's rank-based PIT value exceeds u.
EmpiricalExceedance empirical_exceedance_distribution(const Dataset& sample,
                                                      const Partition& partition, double u);
EmpiricalExceedance empirical_exceedance_distribution(const PitDataset& pit,
                                                      const Partition& partition, double u);

/// P(all blocks of S exceed u) / (1 - u) on PIT data.
double empirical_lambda(const PitDataset& pit, const Partition& partition, BlockMask subset,
                        double u);

struct McTolerances {
  double fi = 0.1;
  double prob = 0.1;
  double lambda = 0.1;
  double tau = 0.1;
  double eps = 0.1;
  double eta = 0.1;
};

struct McCheckSpec {
  MevModel model;
  Partition partition;
  std::vector<double> u = {0.95, 0.99};
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  McTolerances tolerances;
  EstimatorConfig estimator;
};

struct McPoint {
  std::optional<double> u;  // empty for estimators that use k instead of u
  double value = 0.0;
};

struct McQuantity {
  std::string name;
  double closed_form = 0.0;
  std::vector<McPoint> empirical_by_u;
  double abs_error = 0.0;  // at the highest u (or the single estimate)
  double tolerance = 0.0;
  bool pass = false;
  /// Diagnostic: absolute error does not grow as u increases.
  bool converging = true;
};

struct McReport {
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<McQuantity> quantities;
  bool pass = false;
};

/// Validates the spec (u in (0,1), n >= 1000, replicates >= 1) and runs it.
/// Replicate r samples with substream_seed(seed, r); replicates run
/// concurrently and are averaged in replicate order.
McReport mc_check(const McCheckSpec& spec);

}  // namespace blockfi
