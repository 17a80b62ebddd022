#pragma once

// Block Fragility Index: the limiting expected number of exceeding blocks
// given that at least one block exceeds, together with the limiting
// conditional distribution of the exceedance count.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockfi/core.hpp"
#include "blockfi/models.hpp"

namespace blockfi {

/// Extremal coefficients eps_A over a family of coordinate subsets.
class ExtremalCoefficientSet {
 public:
  /// Validates 1 <= eps_A <= |A| and monotonicity under inclusion (pairwise,
  /// for tables of at most 2048 entries).
  ExtremalCoefficientSet(std::size_t d, std::map<SubsetKey, double> coefficients);

  /// eps for every nonempty union of blocks, which covers each block and D.
  static ExtremalCoefficientSet from_model(const MevModel& model, const Partition& partition);
  static ExtremalCoefficientSet from_function(
      const Partition& partition, const std::function<double(const SubsetKey&)>& eps);

  std::size_t dimension() const noexcept { return d_; }
  const std::map<SubsetKey, double>& coefficients() const noexcept { return coefficients_; }
  bool contains(const SubsetKey& subset) const { return coefficients_.contains(subset); }
  /// Throws `incomplete_input` when the subset is missing.
  double at(const SubsetKey& subset) const;

 private:
  std::size_t d_;
  std::map<SubsetKey, double> coefficients_;
};

struct ExceedanceDistribution {
  std::vector<double> probs;  // probs[k - 1] = lim P(N = k | N > 0)
  /// Set when some k had an exactly null numerator and was reported as 0.
  bool null_terms = false;

  double mean() const;
};

struct FragilityBounds {
  double inter_lower = 1.0;
  double inter_upper = 0.0;  // sum_j eps_Ij / max_j eps_Ij
  double intra_lower = 0.0;  // s / eps_D
  double intra_upper = 0.0;  // d / eps_D
  bool independent_blocks = false;        // FI == 1
  bool totally_dependent_blocks = false;  // FI == inter_upper
  bool independent_within = false;        // FI == d / eps_D
  bool totally_dependent_within = false;  // FI == s / eps_D
};

struct FragilityReport {
  double fi = 0.0;
  std::vector<std::string> block_names;
  std::vector<double> eps_blocks;
  double eps_D = 0.0;
  ExceedanceDistribution distribution;
  FragilityBounds bounds;
};

/// x -> log C(e^-x_1, ..., e^-x_d) for x >= 0; evaluating the copula in log
/// space keeps large tail-equivalence constants from underflowing.
using LogCopula = std::function<double(std::span<const double>)>;

LogCopula log_copula(const MevModel& model);

/// sum_j eps_Ij / eps_D.
double fragility_index(const ExtremalCoefficientSet& eps, const Partition& partition);

/// sum_j (|I_j| / d)^alpha for the symmetric logistic model.
double fragility_index_logistic(const Partition& partition, double alpha);

ExceedanceDistribution exceedance_distribution(const ExtremalCoefficientSet& eps,
                                               const Partition& partition);

/// Exceedance distribution for tail-equivalent margins with constants gamma.
ExceedanceDistribution exceedance_distribution_equiv(const LogCopula& copula,
                                                     const MarginSpec& gamma,
                                                     const Partition& partition);
double fragility_index_equiv(const LogCopula& copula, const MarginSpec& gamma,
                             const Partition& partition);

FragilityBounds fragility_bounds(const ExtremalCoefficientSet& eps, const Partition& partition);

/// sum_j (|I_j|/d) FI(X, D*) / FI(X_Ij, D*); equals fragility_index.
double convex_combination_identity(const ExtremalCoefficientSet& eps, const Partition& partition);

struct PowerIdentity {
  double lhs = 0.0;  // G(x 1)
  double rhs = 0.0;  // (prod_j G_Ij(x 1_Ij))^(1/FI)
};

/// Both sides of G(x) = (prod_j G_Ij(x_Ij))^(1/FI) on unit Fréchet margins.
/// Only equal-component x is accepted: the identity is derived on the diagonal.
PowerIdentity power_identity_check(const MevModel& model, const Partition& partition,
                                   std::span<const double> x);

FragilityReport fragility_report(const ExtremalCoefficientSet& eps, const Partition& partition);

namespace detail {

/// f[mask] = eps of the union of the blocks in mask; f[0] = 0.
std::vector<double> union_table(const ExtremalCoefficientSet& eps, const Partition& partition);

/// h(M) = sum_{U superset of M} (-1)^{|U|-|M|} f(U), in O(s 2^s).
std::vector<double> superset_alternating(std::span<const double> f, std::size_t s);

/// g(M) = sum_{nonempty T subset of M} (-1)^{|T|+1} f(T), in O(s 2^s).
std::vector<double> subset_alternating(std::span<const double> f, std::size_t s);

/// Exceedance probabilities from an exponent-measure table over block unions.
ExceedanceDistribution exceedance_from_union_table(std::span<const double> f, std::size_t s);

/// Clamps floating-point dust (|violation| <= 1e-9) into [0, 1]; larger
/// violations raise `inconsistent_coefficients`.
double clip_probability(double p, const char* context);

}  // namespace detail

}  // namespace blockfi
