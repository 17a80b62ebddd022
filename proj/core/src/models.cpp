#include "blockfi/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "blockfi/error.hpp"
#include "blockfi/rng.hpp"

namespace blockfi {
namespace {

constexpr double kRowSumTol = 1e-9;

void check_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::invalid_argument, std::string(what) + " must lie in (0, 1]");
  }
}

// (sum_i v_i^(1/alpha))^alpha over nonnegative v, scaled by the maximum to
// keep v^(1/alpha) finite for small alpha.
double logistic_norm(std::span<const double> v, double alpha) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, x);
  if (peak == 0.0) return 0.0;
  if (alpha == 1.0) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum;
  }
  double sum = 0.0;
  for (double x : v) {
    if (x > 0.0) sum += std::pow(x / peak, 1.0 / alpha);
  }
  return peak * std::pow(sum, alpha);
}

// l(x) without the "not all zero" precondition; l(0) = 0.
double exponent(const MevModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          return logistic_norm(x, m.alpha());
        } else if constexpr (std::is_same_v<T, AsymmetricLogisticModel>) {
          double total = 0.0;
          std::vector<double> scaled(x.size());
          for (std::size_t k = 0; k < m.components(); ++k) {
            for (std::size_t i = 0; i < x.size(); ++i) {
              scaled[i] = m.beta()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) * x[i];
            }
            total += logistic_norm(scaled, m.alphas()[k]);
          }
          return total;
        } else if constexpr (std::is_same_v<T, FactorParetoModel>) {
          double total = 0.0;
          const auto& atoms = m.atoms();
          for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
            double peak = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
              peak = std::max(peak, atoms(static_cast<Eigen::Index>(i), k) * x[i]);
            }
            total += peak;
          }
          return total;
        } else {
          fail(ErrorKind::unsupported,
               "the Gaussian model has no MEV copula; use the asymptotic-independence indices");
        }
      },
      model);
}

void check_point(const MevModel& model, std::span<const double> v) {
  if (v.size() != dimension(model)) {
    fail(ErrorKind::invalid_argument, "argument has length " + std::to_string(v.size()) +
                                          ", model dimension is " +
                                          std::to_string(dimension(model)));
  }
}

}  // namespace

LogisticModel::LogisticModel(std::size_t d, double alpha) : d_(d), alpha_(alpha) {
  if (d_ == 0) fail(ErrorKind::invalid_argument, "dimension must be positive");
  check_alpha(alpha_, "logistic alpha");
}

AsymmetricLogisticModel::AsymmetricLogisticModel(Eigen::MatrixXd beta, std::vector<double> alphas)
    : beta_(std::move(beta)), alphas_(std::move(alphas)) {
  if (beta_.rows() == 0 || beta_.cols() == 0) {
    fail(ErrorKind::invalid_argument, "beta must be a nonempty q x d matrix");
  }
  if (alphas_.size() != static_cast<std::size_t>(beta_.rows())) {
    fail(ErrorKind::invalid_argument, "need one alpha per component (row of beta)");
  }
  for (double a : alphas_) check_alpha(a, "asymmetric logistic alpha_k");
  if ((beta_.array() < 0.0).any() || !beta_.allFinite()) {
    fail(ErrorKind::invalid_argument, "beta weights must be finite and nonnegative");
  }
  for (Eigen::Index i = 0; i < beta_.cols(); ++i) {
    const double sum = beta_.col(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTol) {
      fail(ErrorKind::invalid_argument,
           "beta column " + std::to_string(i + 1) + " sums to " + std::to_string(sum) +
               ", expected 1");
    }
  }
}

FactorParetoModel::FactorParetoModel(Eigen::MatrixXd lambda, double alpha)
    : lambda_(std::move(lambda)), alpha_(alpha) {
  if (lambda_.rows() == 0 || lambda_.cols() == 0) {
    fail(ErrorKind::invalid_argument, "lambda must be a nonempty d x m matrix");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    fail(ErrorKind::invalid_argument, "Pareto shape alpha must be positive");
  }
  if ((lambda_.array() < 0.0).any() || !lambda_.allFinite()) {
    fail(ErrorKind::invalid_argument, "factor weights must be finite and nonnegative");
  }
  atoms_ = lambda_.array().pow(alpha_).matrix();
  for (Eigen::Index i = 0; i < atoms_.rows(); ++i) {
    const double sum = atoms_.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTol) {
      fail(ErrorKind::invalid_argument,
           "row " + std::to_string(i + 1) + " has sum_k lambda_ik^alpha = " +
               std::to_string(sum) + ", expected 1");
    }
  }
}

GaussianModel::GaussianModel(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() == 0 || sigma_.rows() != sigma_.cols()) {
    fail(ErrorKind::invalid_argument, "correlation matrix must be square and nonempty");
  }
  if (!sigma_.allFinite() || !sigma_.isApprox(sigma_.transpose(), 1e-12)) {
    fail(ErrorKind::invalid_argument, "correlation matrix must be symmetric");
  }
  if ((sigma_.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
    fail(ErrorKind::invalid_argument, "correlation matrix must have unit diagonal");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::invalid_argument, "correlation matrix is not positive definite");
  }
  chol_ = llt.matrixL();
}

std::size_t dimension(const MevModel& model) {
  return std::visit([](const auto& m) { return m.dimension(); }, model);
}

std::string family_name(const MevModel& model) {
  switch (model.index()) {
    case 0: return "logistic";
    case 1: return "asymmetric_logistic";
    case 2: return "factor_pareto";
    default: return "gaussian";
  }
}

bool has_extremal_coefficients(const MevModel& model) {
  return !std::holds_alternative<GaussianModel>(model);
}

double extremal_coefficient(const MevModel& model, const SubsetKey& subset) {
  const std::size_t d = dimension(model);
  if (subset.indices().back() > d) {
    fail(ErrorKind::invalid_argument, "subset " + subset.to_string() + " exceeds dimension " +
                                          std::to_string(d));
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          return std::pow(static_cast<double>(subset.size()), m.alpha());
        } else if constexpr (std::is_same_v<T, AsymmetricLogisticModel>) {
          double total = 0.0;
          for (std::size_t k = 0; k < m.components(); ++k) {
            const double a = m.alphas()[k];
            double inner = 0.0;
            for (std::size_t i : subset.indices()) {
              const double b = m.beta()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i - 1));
              if (b > 0.0) inner += std::pow(b, 1.0 / a);
            }
            if (inner > 0.0) total += std::pow(inner, a);
          }
          return total;
        } else if constexpr (std::is_same_v<T, FactorParetoModel>) {
          double total = 0.0;
          for (Eigen::Index k = 0; k < m.atoms().cols(); ++k) {
            double peak = 0.0;
            for (std::size_t i : subset.indices()) {
              peak = std::max(peak, m.atoms()(static_cast<Eigen::Index>(i - 1), k));
            }
            total += peak;
          }
          return total;
        } else {
          fail(ErrorKind::unsupported,
               "extremal coefficients are not defined for the Gaussian model "
               "(asymptotic independence); use the eta indices instead");
        }
      },
      model);
}

double stable_tail_dependence(const MevModel& model, std::span<const double> x) {
  check_point(model, x);
  bool any_positive = false;
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::invalid_argument, "stable tail dependence needs finite x >= 0");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) fail(ErrorKind::invalid_argument, "x must not be identically zero");
  return exponent(model, x);
}

double copula_value(const MevModel& model, std::span<const double> u) {
  check_point(model, u);
  std::vector<double> x(u.size());
  bool at_zero = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
      fail(ErrorKind::invalid_argument, "copula arguments must lie in [0, 1]");
    }
    if (u[i] == 0.0) at_zero = true;
    x[i] = -std::log(u[i]);
  }
  if (at_zero) {
    exponent(model, std::vector<double>(u.size(), 0.0));  // rejects Gaussian consistently
    return 0.0;
  }
  return std::exp(-exponent(model, x));
}

std::vector<std::string> default_labels(std::size_t d) {
  std::vector<std::string> labels;
  labels.reserve(d);
  for (std::size_t i = 1; i <= d; ++i) labels.push_back("X" + std::to_string(i));
  return labels;
}

double positive_stable(double alpha, double uniform_angle01, double exponential) {
  if (alpha == 1.0) return 1.0;
  const double u = std::numbers::pi * uniform_angle01;
  const double log_s = std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                       (1.0 - alpha) / alpha *
                           (std::log(std::sin((1.0 - alpha) * u)) - std::log(exponential));
  return std::exp(log_s);
}

namespace {

// One logistic row with unit Fréchet margins: X_i = (S / E_i)^alpha.
void logistic_row(Rng& rng, double alpha, std::span<double> out) {
  if (alpha == 1.0) {
    for (double& v : out) v = 1.0 / rng.exponential();
    return;
  }
  const double angle = rng.uniform();
  const double s = positive_stable(alpha, angle, rng.exponential());
  for (double& v : out) v = std::pow(s / rng.exponential(), alpha);
}

}  // namespace

Dataset sample(const MevModel& model, std::size_t n, std::uint64_t seed) {
  return sample(model, n, seed, default_labels(dimension(model)));
}

Dataset sample(const MevModel& model, std::size_t n, std::uint64_t seed,
               std::vector<std::string> labels) {
  if (n == 0) fail(ErrorKind::invalid_argument, "sample size must be at least 1");
  const std::size_t d = dimension(model);
  if (labels.size() != d) fail(ErrorKind::invalid_argument, "need one label per coordinate");
  Rng rng(seed);
  // Row-major buffer, transposed into the column-major matrix at the end.
  Eigen::MatrixXd buf(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (Eigen::Index r = 0; r < buf.cols(); ++r) {
          std::span<double> row(buf.col(r).data(), d);
          if constexpr (std::is_same_v<T, LogisticModel>) {
            logistic_row(rng, m.alpha(), row);
          } else if constexpr (std::is_same_v<T, AsymmetricLogisticModel>) {
            std::vector<double> z(d);
            std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t k = 0; k < m.components(); ++k) {
              logistic_row(rng, m.alphas()[k], z);
              for (std::size_t i = 0; i < d; ++i) {
                const double b = m.beta()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
                row[i] = std::max(row[i], b * z[i]);
              }
            }
          } else if constexpr (std::is_same_v<T, FactorParetoModel>) {
            Eigen::VectorXd y(m.lambda().cols());
            for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = rng.pareto(m.alpha());
            buf.col(r) = m.lambda() * y;
          } else {
            Eigen::VectorXd z(static_cast<Eigen::Index>(d));
            for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
            buf.col(r) = m.cholesky() * z;
          }
        }
      },
      model);

  return Dataset(buf.transpose(), std::move(labels));
}

}  // namespace blockfi
