#pragma once

// Asymptotic-independence indices eta: for a sub-vector, for the system split
// into blocks (block AIFI), and the transversal combination coefficient.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blockfi/core.hpp"
#include "blockfi/error.hpp"
#include "blockfi/models.hpp"

namespace blockfi {

/// Exact rational with a positive reduced denominator.
class Fraction {
 public:
  Fraction(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) fail(ErrorKind::numeric, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend Fraction operator+(Fraction a, Fraction b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Fraction operator-(Fraction a, Fraction b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Fraction operator*(Fraction a, Fraction b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend Fraction operator/(Fraction a, Fraction b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  friend bool operator==(Fraction a, Fraction b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(Fraction a, Fraction b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline double to_double(double v) { return v; }
inline double to_double(Fraction v) { return v.to_double(); }

/// Block AIFI: eta_D (1/s) sum_j 1/eta_Ij. Works on double or Fraction.
template <class T>
T eta_block_aifi(T eta_D, std::span<const T> eta_blocks) {
  if (eta_blocks.empty()) fail(ErrorKind::invalid_argument, "need at least one block eta");
  auto check = [](T v) {
    if (!(to_double(v) > 0.0 && to_double(v) <= 1.0 + 1e-12)) {
      fail(ErrorKind::invalid_argument, "eta values must lie in (0, 1]");
    }
  };
  check(eta_D);
  T sum = T(0);
  for (const T& v : eta_blocks) {
    check(v);
    sum = sum + T(1) / v;
  }
  return eta_D * sum / T(static_cast<std::int64_t>(eta_blocks.size()));
}

/// Calls `visit` with every transversal {i_1, ..., i_s}, i_j in I_j.
void for_each_transversal(const Partition& partition,
                          const std::function<void(const SubsetKey&)>& visit);

/// max over transversals {i_1, ..., i_s} with i_j in I_j of eta.
template <class T>
T eta_combination(const std::function<T(const SubsetKey&)>& eta_lookup,
                  const Partition& partition) {
  bool first = true;
  T best{};
  for_each_transversal(partition, [&](const SubsetKey& t) {
    const T v = eta_lookup(t);
    if (first || best < v) best = v;
    first = false;
  });
  return best;
}

/// 1 / (1' Sigma_A^{-1} 1). Throws `numeric` when the submatrix condition
/// number exceeds 1e12.
double eta_gaussian(const Eigen::MatrixXd& sigma, const SubsetKey& subset);
double eta_gaussian(const GaussianModel& model, const SubsetKey& subset);

enum class Association { positive, negative, unknown };
std::string to_string(Association a);

/// Positive (negative) when every off-diagonal correlation is >= 0 (<= 0).
Association gaussian_association(const GaussianModel& model);

struct EtaBounds {
  double aifi = 0.0;
  double inverse_s = 0.0;                // 1/s
  double total_dependence_value = 0.0;   // (min_j eta_Ij / s) sum_j 1/eta_Ij
  double independent_within_value = 0.0; // eta_D d / s
  double eta_D = 0.0;
  Association association = Association::unknown;
  // Inter-block: positive association => aifi >= 1/s, negative => aifi <= 1/s.
  // aifi <= total_dependence_value always. Intra-block: positive association
  // => aifi <= eta_D d / s, negative => aifi >= eta_D d / s; aifi >= eta_D.
  bool holds = true;
  bool independent_blocks = false;        // aifi == 1/s
  bool totally_dependent_blocks = false;  // aifi == total_dependence_value
  bool independent_within = false;        // aifi == eta_D d / s
  bool totally_dependent_within = false;  // aifi == eta_D
};

EtaBounds eta_bounds(double eta_D, std::span<const double> eta_blocks, const Partition& partition,
                     Association association);

struct EtaReport {
  double eta_D = 0.0;
  std::vector<double> eta_blocks;
  double eta_block_aifi = 0.0;
  double eta_combination = 0.0;
  Association association = Association::unknown;
  /// Set when the fragility index exceeds 1, where eta carries no information.
  bool fi_exceeds_one = false;
};

EtaReport eta_report_gaussian(const GaussianModel& model, const Partition& partition);

/// eta_A of an MEV model: 1 whenever the coordinates of A are jointly tail
/// dependent (lambda_A > 0); `unsupported` otherwise.
double eta_mev(const MevModel& model, const SubsetKey& subset);

/// X_i = min_{v in L_i} V_v over i.i.d. unit Pareto latents V, so that
/// P(X_A > x) = x^{-|union of L_i, i in A|} exactly.
class MinParetoStructure {
 public:
  explicit MinParetoStructure(std::vector<std::vector<std::size_t>> latent_sets);

  std::size_t dimension() const noexcept { return sets_.size(); }
  std::size_t latent_count() const noexcept { return latents_; }
  std::span<const std::vector<std::size_t>> latent_sets() const noexcept { return sets_; }

  /// eta_A = sum_{i in A} |L_i| / (|A| |union L_i|).
  Fraction eta(const SubsetKey& subset) const;
  /// Block AIFI from the defining limit: (1/s) sum_j |L(I_j)| / |L(D)|.
  Fraction block_aifi_direct(const Partition& partition) const;
  /// Combination coefficient from the defining limit of block exceedances.
  Fraction combination_direct(const Partition& partition) const;
  /// Exact fragility index from the leading terms of the exceedance probabilities.
  Fraction fragility_index(const Partition& partition) const;

  EtaReport eta_report(const Partition& partition) const;
  Dataset sample(std::size_t n, std::uint64_t seed) const;

 private:
  std::vector<std::vector<std::size_t>> sets_;
  std::size_t latents_ = 0;
};

/// The three-variable structure X1 = min(V1,V2), X2 = min(V2,V3), X3 = min(V3,V4).
MinParetoStructure chained_min_pareto();

}  // namespace blockfi
