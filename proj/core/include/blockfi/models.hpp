#pragma once

// Parametric multivariate extreme-value families with closed-form extremal
// coefficients, copulas, stable tail dependence functions and exact samplers.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "blockfi/core.hpp"

namespace blockfi {

/// Symmetric logistic: C(u) = exp(-(sum (-log u_i)^(1/alpha))^alpha), 0 < alpha <= 1.
class LogisticModel {
 public:
  LogisticModel(std::size_t d, double alpha);

  std::size_t dimension() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }

 private:
  std::size_t d_;
  double alpha_;
};

/// Asymmetric logistic with q components. `beta` is q x d with nonnegative
/// entries and unit column sums; each alpha_k lies in (0, 1].
class AsymmetricLogisticModel {
 public:
  AsymmetricLogisticModel(Eigen::MatrixXd beta, std::vector<double> alphas);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(beta_.cols()); }
  std::size_t components() const noexcept { return static_cast<std::size_t>(beta_.rows()); }
  const Eigen::MatrixXd& beta() const noexcept { return beta_; }
  std::span<const double> alphas() const noexcept { return alphas_; }

 private:
  Eigen::MatrixXd beta_;
  std::vector<double> alphas_;
};

/// X_i = sum_k lambda_ik Y_k with Y_k i.i.d. Pareto(alpha). `lambda` is d x m
/// and every row satisfies sum_k lambda_ik^alpha = 1.
class FactorParetoModel {
 public:
  FactorParetoModel(Eigen::MatrixXd lambda, double alpha);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(lambda_.rows()); }
  std::size_t factors() const noexcept { return static_cast<std::size_t>(lambda_.cols()); }
  const Eigen::MatrixXd& lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }
  /// Spectral atoms lambda_ik^alpha (d x m); column k is the atom of factor k.
  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }

 private:
  Eigen::MatrixXd lambda_;
  double alpha_;
  Eigen::MatrixXd atoms_;
};

/// Standard Gaussian vector with a positive definite correlation matrix.
/// Asymptotically independent; it has no extremal coefficients.
class GaussianModel {
 public:
  explicit GaussianModel(Eigen::MatrixXd sigma);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  /// Lower Cholesky factor of sigma.
  const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
};

using MevModel = std::variant<LogisticModel, AsymmetricLogisticModel, FactorParetoModel, GaussianModel>;

std::size_t dimension(const MevModel& model);
/// "logistic", "asymmetric_logistic", "factor_pareto" or "gaussian".
std::string family_name(const MevModel& model);
bool has_extremal_coefficients(const MevModel& model);

/// Closed-form extremal coefficient eps_A. Throws `unsupported` for Gaussian.
double extremal_coefficient(const MevModel& model, const SubsetKey& subset);

/// Stable tail dependence function l(x) = -log C(e^-x_1, ..., e^-x_d), x >= 0.
double stable_tail_dependence(const MevModel& model, std::span<const double> x);

/// MEV copula C(u) on [0, 1]^d. A zero component gives 0.
double copula_value(const MevModel& model, std::span<const double> u);

std::vector<std::string> default_labels(std::size_t d);

/// n i.i.d. rows, deterministic in `seed`. Logistic families have unit Fréchet
/// margins; the factor model keeps its Pareto-mixture margins; Gaussian rows
/// are standard normal.
Dataset sample(const MevModel& model, std::size_t n, std::uint64_t seed);
Dataset sample(const MevModel& model, std::size_t n, std::uint64_t seed,
               std::vector<std::string> labels);

/// Positive alpha-stable variate with Laplace transform exp(-t^alpha), from a
/// uniform angle on (0, pi) and a unit exponential (Kanter's form of the
/// Chambers-Mallows-Stuck transformation).
double positive_stable(double alpha, double uniform_angle01, double exponential);

}  // namespace blockfi
