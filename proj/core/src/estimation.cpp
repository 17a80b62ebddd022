#include "blockfi/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "blockfi/error.hpp"

namespace blockfi {
namespace {

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) {
    fail(ErrorKind::invalid_argument, "top order statistic count k = " + std::to_string(k) +
                                          " must satisfy 1 <= k < n = " + std::to_string(n));
  }
}

void check_subset(const PitDataset& pit, const SubsetKey& subset) {
  if (subset.indices().back() > pit.cols()) {
    fail(ErrorKind::invalid_argument, "subset " + subset.to_string() + " exceeds dimension " +
                                          std::to_string(pit.cols()));
  }
}

void check_partition(const PitDataset& pit, const Partition& partition) {
  if (partition.dimension() != pit.cols()) {
    fail(ErrorKind::invalid_argument, "partition dimension does not match the data");
  }
}

}  // namespace

std::size_t EstimatorConfig::lambda_k(std::size_t n) const {
  const std::size_t k =
      k_lambda.value_or(static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n) * static_cast<double>(n)))));
  check_k(k, n);
  return k;
}

std::size_t EstimatorConfig::hill_k(std::size_t n) const {
  const std::size_t k =
      k_hill.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  check_k(k, n);
  return k;
}

PitDataset::PitDataset(Eigen::MatrixXd values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (labels_.size() != cols()) fail(ErrorKind::data, "label count does not match column count");
  if (!((values_.array() > 0.0).all() && (values_.array() < 1.0).all())) {
    fail(ErrorKind::data, "pseudo-observations must lie in (0, 1)");
  }
}

PitDataset pit_transform(const Dataset& data) {
  const std::size_t n = data.rows();
  if (n < 2) fail(ErrorKind::data, "need at least 2 observations");
  Eigen::MatrixXd u(data.values().rows(), data.values().cols());
  std::vector<double> sorted(n);
  const double denom = static_cast<double>(n) + 1.0;
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const auto col = data.values().col(c);
    std::copy(col.begin(), col.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
      fail(ErrorKind::data, "column '" + data.labels()[static_cast<std::size_t>(c)] +
                                "' is constant; its empirical d.f. is degenerate");
    }
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const auto count = std::upper_bound(sorted.begin(), sorted.end(), col(r)) - sorted.begin();
      u(r, c) = static_cast<double>(count) / denom;
    }
  }
  return PitDataset(std::move(u), {data.labels().begin(), data.labels().end()});
}

double block_max_mean(const PitDataset& pit, const SubsetKey& subset) {
  check_subset(pit, subset);
  const auto idx = subset.indices();
  double sum = 0.0;
  for (Eigen::Index r = 0; r < pit.values().rows(); ++r) {
    double m = 0.0;
    for (std::size_t i : idx) m = std::max(m, pit.values()(r, static_cast<Eigen::Index>(i - 1)));
    sum += m;
  }
  return sum / static_cast<double>(pit.rows());
}

EpsEstimate extremal_coef_hat(const PitDataset& pit, const SubsetKey& subset,
                              const EstimatorConfig& config) {
  EpsEstimate e;
  e.mbar = block_max_mean(pit, subset);
  e.raw = e.mbar / (1.0 - e.mbar);
  e.value = config.clamp_eps ? std::clamp(e.raw, 1.0, static_cast<double>(subset.size())) : e.raw;
  return e;
}

FragilityEstimate fi_hat(const PitDataset& pit, const Partition& partition,
                         const EstimatorConfig& config) {
  check_partition(pit, partition);
  FragilityEstimate out;
  out.n = pit.rows();
  double sum = 0.0;
  double sum_raw = 0.0;
  for (const auto& block : partition.blocks()) {
    const auto e = extremal_coef_hat(pit, SubsetKey(block.members), config);
    out.eps_blocks.push_back(e);
    out.fi_blocks.push_back(static_cast<double>(block.members.size()) / e.value);
    out.report.block_names.push_back(block.name);
    out.report.eps_blocks.push_back(e.value);
    sum += e.value;
    sum_raw += e.raw;
  }
  const auto full = SubsetKey::full(partition.dimension());
  out.eps_D = extremal_coef_hat(pit, full, config);
  out.report.eps_D = out.eps_D.value;
  out.report.fi = sum / out.eps_D.value;
  out.fi_raw = sum_raw / out.eps_D.raw;
  out.fi_global = static_cast<double>(partition.dimension()) / out.eps_D.value;

  const auto peak = *std::max_element(out.report.eps_blocks.begin(), out.report.eps_blocks.end());
  auto& b = out.report.bounds;
  b.inter_upper = sum / peak;
  b.intra_lower = static_cast<double>(partition.size()) / out.eps_D.value;
  b.intra_upper = static_cast<double>(partition.dimension()) / out.eps_D.value;

  // The plug-in exceedance distribution needs a coherent table over every
  // union of blocks; finite-sample estimates may not be one.
  try {
    const auto table = ExtremalCoefficientSet::from_function(
        partition, [&](const SubsetKey& key) {
          return extremal_coef_hat(pit, key, EstimatorConfig{}).value;
        });
    out.report.distribution = exceedance_distribution(table, partition);
  } catch (const Error& e) {
    out.distribution_note = e.what();
  }
  return out;
}

ScalarEstimate lambda_hat(const PitDataset& pit, const Partition& partition,
                          std::span<const std::size_t> blocks, const EstimatorConfig& config) {
  check_partition(pit, partition);
  const BlockMask mask = block_mask(partition, blocks);
  const std::size_t n = pit.rows();
  const std::size_t k = config.lambda_k(n);
  const double threshold = 1.0 - static_cast<double>(k) / static_cast<double>(n);
  std::size_t count = 0;
  for (Eigen::Index r = 0; r < pit.values().rows(); ++r) {
    bool all = true;
    for (std::size_t j = 0; j < partition.size() && all; ++j) {
      if (!(mask & (BlockMask{1} << j))) continue;
      double m = 0.0;
      for (std::size_t i : partition.blocks()[j].members) {
        m = std::max(m, pit.values()(r, static_cast<Eigen::Index>(i - 1)));
      }
      all = m > threshold;
    }
    if (all) ++count;
  }
  const double v = static_cast<double>(count) / static_cast<double>(k);
  return {v, v, k};
}

ScalarEstimate hill_eta_hat(const PitDataset& pit, const SubsetKey& subset,
                            const EstimatorConfig& config) {
  check_subset(pit, subset);
  const std::size_t n = pit.rows();
  const std::size_t k = config.hill_k(n);
  if (subset.size() == 1) return {1.0, 1.0, k};

  std::vector<double> t(n);
  for (std::size_t r = 0; r < n; ++r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i : subset.indices()) {
      m = std::min(m, 1.0 / (1.0 - pit.values()(static_cast<Eigen::Index>(r),
                                                 static_cast<Eigen::Index>(i - 1))));
    }
    t[r] = m;
  }
  // Top k + 1 order statistics, descending.
  std::partial_sort(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k + 1), t.end(),
                    std::greater<>());
  const double base = t[k];
  if (!(base > 0.0)) fail(ErrorKind::numeric, "nonpositive order statistic in Hill estimator");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(t[i] / base);
  const double raw = sum / static_cast<double>(k);
  if (!(raw > 0.0)) {
    fail(ErrorKind::numeric, "Hill estimate is not positive; the top order statistics are tied");
  }
  return {raw, std::min(raw, 1.0), k};
}

ScalarEstimate hill_eta_hat(const Dataset& data, const SubsetKey& subset,
                            const EstimatorConfig& config) {
  return hill_eta_hat(pit_transform(data), subset, config);
}

EtaEstimate eta_reports_hat(const PitDataset& pit, const Partition& partition,
                            const EstimatorConfig& config) {
  check_partition(pit, partition);
  EtaEstimate out;
  out.eta_D = hill_eta_hat(pit, SubsetKey::full(partition.dimension()), config);
  out.report.eta_D = out.eta_D.value;
  for (const auto& block : partition.blocks()) {
    out.eta_blocks.push_back(hill_eta_hat(pit, SubsetKey(block.members), config));
    out.report.eta_blocks.push_back(out.eta_blocks.back().value);
  }
  out.report.eta_block_aifi = eta_block_aifi<double>(out.report.eta_D, out.report.eta_blocks);
  out.report.eta_combination = eta_combination<double>(
      [&](const SubsetKey& t) { return hill_eta_hat(pit, t, config).value; }, partition);
  out.fi_hat = fi_hat(pit, partition, config).report.fi;
  out.report.fi_exceeds_one = out.fi_hat > config.fi_flag_threshold;
  return out;
}

EtaEstimate eta_reports_hat(const Dataset& data, const Partition& partition,
                            const EstimatorConfig& config) {
  return eta_reports_hat(pit_transform(data), partition, config);
}

}  // namespace blockfi
