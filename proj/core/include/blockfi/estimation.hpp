#pragma once

// Nonparametric estimators on rank-transformed data: sample means of block
// maxima for extremal coefficients, threshold counts for tail dependence and
// a Hill-type estimator for the asymptotic-independence index eta.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blockfi/asympt_indep.hpp"
#include "blockfi/core.hpp"
#include "blockfi/fragility.hpp"

namespace blockfi {

struct EstimatorConfig {
  std::optional<std::size_t> k_lambda;  // default floor(n^(2/3))
  std::optional<std::size_t> k_hill;    // default floor(sqrt(n))
  bool clamp_eps = true;
  /// Block AIFI output is flagged when the fragility estimate exceeds this.
  double fi_flag_threshold = 1.1;

  std::size_t lambda_k(std::size_t n) const;
  std::size_t hill_k(std::size_t n) const;
};

/// Pseudo-observations F_j(X_ij) with the (n + 1)-denominator empirical d.f.
class PitDataset {
 public:
  PitDataset(Eigen::MatrixXd values, std::vector<std::string> labels);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  std::span<const std::string> labels() const noexcept { return labels_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> labels_;
};

/// Replaces each value by (number of observations <= it) / (n + 1).
PitDataset pit_transform(const Dataset& data);

/// Mean over rows of max_{j in A} U_ij.
double block_max_mean(const PitDataset& pit, const SubsetKey& subset);

struct EpsEstimate {
  double mbar = 0.0;
  double raw = 0.0;    // mbar / (1 - mbar)
  double value = 0.0;  // raw, clamped to [1, |A|] when configured
};

EpsEstimate extremal_coef_hat(const PitDataset& pit, const SubsetKey& subset,
                              const EstimatorConfig& config = {});

struct ScalarEstimate {
  double raw = 0.0;
  double value = 0.0;
  std::size_t k = 0;
};

struct FragilityEstimate {
  FragilityReport report;  // plug-in values; distribution empty when inconsistent
  std::vector<EpsEstimate> eps_blocks;
  EpsEstimate eps_D;
  std::vector<double> fi_blocks;  // |I_j| / eps_Ij, fragility within each block
  double fi_global = 0.0;         // d / eps_D
  double fi_raw = 0.0;            // from unclamped coefficients
  std::size_t n = 0;
  std::string distribution_note;
};

FragilityEstimate fi_hat(const PitDataset& pit, const Partition& partition,
                         const EstimatorConfig& config = {});

/// (1/k) #{rows: min_{j in S} max_{l in I_j} U_il > 1 - k/n}.
ScalarEstimate lambda_hat(const PitDataset& pit, const Partition& partition,
                          std::span<const std::size_t> blocks, const EstimatorConfig& config = {});

/// Hill estimator over the top k of T_i = min_{l in A} 1 / (1 - U_il), truncated
/// to (0, 1]. A single coordinate has eta = 1 by definition.
ScalarEstimate hill_eta_hat(const PitDataset& pit, const SubsetKey& subset,
                            const EstimatorConfig& config = {});
ScalarEstimate hill_eta_hat(const Dataset& data, const SubsetKey& subset,
                            const EstimatorConfig& config = {});

struct EtaEstimate {
  EtaReport report;
  ScalarEstimate eta_D;
  std::vector<ScalarEstimate> eta_blocks;
  double fi_hat = 0.0;
};

EtaEstimate eta_reports_hat(const PitDataset& pit, const Partition& partition,
                            const EstimatorConfig& config = {});
EtaEstimate eta_reports_hat(const Dataset& data, const Partition& partition,
                            const EstimatorConfig& config = {});

}  // namespace blockfi
