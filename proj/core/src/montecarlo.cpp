#include "blockfi/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include "blockfi/asympt_indep.hpp"
#include "blockfi/error.hpp"
#include "blockfi/rng.hpp"
#include "blockfi/taildep.hpp"

namespace blockfi {
namespace {

void check_u(double u) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::invalid_argument, "quantile u must lie in (0, 1)");
}

// Row-wise block exceedance bitmask at level u.
BlockMask row_exceedances(const PitDataset& pit, const Partition& partition, Eigen::Index r,
                          double u) {
  BlockMask mask = 0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    for (std::size_t i : partition.blocks()[j].members) {
      if (pit.values()(r, static_cast<Eigen::Index>(i - 1)) > u) {
        mask |= BlockMask{1} << j;
        break;
      }
    }
  }
  return mask;
}

std::string block_set_name(BlockMask mask) {
  std::string out = "{";
  bool first = true;
  for (std::size_t j : mask_positions(mask)) {
    if (!first) out += ',';
    out += std::to_string(j);
    first = false;
  }
  return out + "}";
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One checked quantity: a closed form plus an evaluator on one replicate's
// PIT sample, either per threshold u or threshold-free.
struct Probe {
  std::string name;
  double closed_form;
  double tolerance;
  bool per_u;
  std::function<double(const PitDataset&, double)> evaluate;
};

std::vector<Probe> mev_probes(const McCheckSpec& spec) {
  const auto& partition = spec.partition;
  const auto eps = ExtremalCoefficientSet::from_model(spec.model, partition);
  const auto dist = exceedance_distribution(eps, partition);
  const auto lambda = TailDependenceSet::from_extremal(eps, partition);
  const auto& tol = spec.tolerances;
  std::vector<Probe> probes;

  probes.push_back({"fi", fragility_index(eps, partition), tol.fi, true,
                    [&partition](const PitDataset& pit, double u) {
                      return empirical_exceedance_distribution(pit, partition, u).mean;
                    }});
  for (std::size_t k = 1; k <= partition.size(); ++k) {
    probes.push_back({"p_" + std::to_string(k), dist.probs[k - 1], tol.prob, true,
                      [&partition, k](const PitDataset& pit, double u) {
                        return empirical_exceedance_distribution(pit, partition, u)
                            .distribution.probs[k - 1];
                      }});
  }
  for (BlockMask s = 1; s <= partition.full_mask(); ++s) {
    probes.push_back({"lambda" + block_set_name(s), lambda.lambda(s), tol.lambda, true,
                      [&partition, s](const PitDataset& pit, double u) {
                        return empirical_lambda(pit, partition, s, u);
                      }});
  }
  for (BlockMask s = 1; s < partition.full_mask(); ++s) {
    if (lambda.lambda(s) <= 1e-12) continue;
    const BlockMask full = partition.full_mask();
    probes.push_back({"tau" + block_set_name(s), lambda.tau(s), tol.tau, true,
                      [&partition, s, full](const PitDataset& pit, double u) {
                        const double denom = empirical_lambda(pit, partition, s, u);
                        return denom > 0.0 ? empirical_lambda(pit, partition, full, u) / denom
                                           : kNaN;
                      }});
  }
  const EstimatorConfig est = spec.estimator;
  for (std::size_t j = 1; j <= partition.size(); ++j) {
    const SubsetKey key(partition.block(j).members);
    probes.push_back({"eps_hat_" + partition.block(j).name, eps.at(key), tol.eps, false,
                      [key, est](const PitDataset& pit, double) {
                        return extremal_coef_hat(pit, key, est).value;
                      }});
  }
  const auto full_key = SubsetKey::full(partition.dimension());
  probes.push_back({"eps_hat_D", eps.at(full_key), tol.eps, false,
                    [full_key, est](const PitDataset& pit, double) {
                      return extremal_coef_hat(pit, full_key, est).value;
                    }});
  probes.push_back({"fi_hat", fragility_index(eps, partition), tol.fi, false,
                    [&partition, est](const PitDataset& pit, double) {
                      return fi_hat(pit, partition, est).report.fi;
                    }});
  return probes;
}

std::vector<Probe> gaussian_probes(const McCheckSpec& spec) {
  const auto& model = std::get<GaussianModel>(spec.model);
  const auto& partition = spec.partition;
  const auto closed = eta_report_gaussian(model, partition);
  const double tol = spec.tolerances.eta;
  const EstimatorConfig est = spec.estimator;
  std::vector<Probe> probes;
  const auto full_key = SubsetKey::full(partition.dimension());
  probes.push_back({"eta_D", closed.eta_D, tol, false, [full_key, est](const PitDataset& pit, double) {
                      return hill_eta_hat(pit, full_key, est).value;
                    }});
  for (std::size_t j = 1; j <= partition.size(); ++j) {
    if (partition.block_size(j) < 2) continue;
    const SubsetKey key(partition.block(j).members);
    probes.push_back({"eta_" + partition.block(j).name, closed.eta_blocks[j - 1], tol, false,
                      [key, est](const PitDataset& pit, double) {
                        return hill_eta_hat(pit, key, est).value;
                      }});
  }
  probes.push_back({"eta_block_aifi", closed.eta_block_aifi, tol, false,
                    [&partition, est](const PitDataset& pit, double) {
                      return eta_reports_hat(pit, partition, est).report.eta_block_aifi;
                    }});
  probes.push_back({"eta_combination", closed.eta_combination, tol, false,
                    [&partition, est](const PitDataset& pit, double) {
                      return eta_reports_hat(pit, partition, est).report.eta_combination;
                    }});
  return probes;
}

double safe_evaluate(const Probe& probe, const PitDataset& pit, double u) {
  try {
    return probe.evaluate(pit, u);
  } catch (const Error&) {
    return kNaN;
  }
}

}  // namespace

EmpiricalExceedance empirical_exceedance_distribution(const PitDataset& pit,
                                                      const Partition& partition, double u) {
  check_u(u);
  if (partition.dimension() != pit.cols()) {
    fail(ErrorKind::invalid_argument, "partition dimension does not match the data");
  }
  std::vector<std::size_t> counts(partition.size(), 0);
  std::size_t total = 0;
  std::size_t exceeding = 0;
  for (Eigen::Index r = 0; r < pit.values().rows(); ++r) {
    const auto n = static_cast<std::size_t>(std::popcount(row_exceedances(pit, partition, r, u)));
    if (n == 0) continue;
    ++counts[n - 1];
    total += n;
    ++exceeding;
  }
  if (exceeding == 0) {
    fail(ErrorKind::undefined_limit, "no row has a block exceedance at u = " + std::to_string(u));
  }
  EmpiricalExceedance out;
  out.u = u;
  out.rows_with_exceedance = exceeding;
  out.mean = static_cast<double>(total) / static_cast<double>(exceeding);
  out.distribution.probs.resize(partition.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out.distribution.probs[k] = static_cast<double>(counts[k]) / static_cast<double>(exceeding);
  }
  return out;
}

EmpiricalExceedance empirical_exceedance_distribution(const Dataset& sample,
                                                      const Partition& partition, double u) {
  return empirical_exceedance_distribution(pit_transform(sample), partition, u);
}

double empirical_lambda(const PitDataset& pit, const Partition& partition, BlockMask subset,
                        double u) {
  check_u(u);
  if (subset == 0 || (subset & ~partition.full_mask()) != 0) {
    fail(ErrorKind::invalid_argument, "block subset is empty or out of range");
  }
  std::size_t count = 0;
  for (Eigen::Index r = 0; r < pit.values().rows(); ++r) {
    if ((row_exceedances(pit, partition, r, u) & subset) == subset) ++count;
  }
  return static_cast<double>(count) / (static_cast<double>(pit.rows()) * (1.0 - u));
}

McReport mc_check(const McCheckSpec& spec) {
  if (spec.n < 1000) fail(ErrorKind::invalid_argument, "Monte-Carlo checks need n >= 1000");
  if (spec.replicates < 1) fail(ErrorKind::invalid_argument, "need at least one replicate");
  if (spec.u.empty()) fail(ErrorKind::invalid_argument, "need at least one quantile u");
  for (double u : spec.u) check_u(u);
  if (dimension(spec.model) != spec.partition.dimension()) {
    fail(ErrorKind::invalid_argument, "model and partition disagree on dimension");
  }
  std::vector<double> levels = spec.u;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const auto probes =
      has_extremal_coefficients(spec.model) ? mev_probes(spec) : gaussian_probes(spec);

  // values[r][p][l]: replicate r, probe p, level l (a single slot for u-free probes).
  auto run_replicate = [&](std::size_t r) {
    const auto data = sample(spec.model, spec.n, substream_seed(spec.seed, r));
    const auto pit = pit_transform(data);
    std::vector<std::vector<double>> values(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
      if (probes[p].per_u) {
        for (double u : levels) values[p].push_back(safe_evaluate(probes[p], pit, u));
      } else {
        values[p].push_back(safe_evaluate(probes[p], pit, 0.0));
      }
    }
    return values;
  };
  std::vector<std::future<std::vector<std::vector<double>>>> futures;
  for (std::size_t r = 0; r < spec.replicates; ++r) {
    futures.push_back(std::async(std::launch::async, run_replicate, r));
  }
  std::vector<std::vector<std::vector<double>>> results;
  for (auto& f : futures) results.push_back(f.get());

  McReport report;
  report.family = family_name(spec.model);
  report.n = spec.n;
  report.seed = spec.seed;
  report.replicates = spec.replicates;
  report.pass = true;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    McQuantity q;
    q.name = probes[p].name;
    q.closed_form = probes[p].closed_form;
    q.tolerance = probes[p].tolerance;
    const std::size_t slots = results.front()[p].size();
    std::vector<double> errors;
    for (std::size_t l = 0; l < slots; ++l) {
      double mean = 0.0;
      for (const auto& rep : results) mean += rep[p][l];
      mean /= static_cast<double>(results.size());
      McPoint point;
      if (probes[p].per_u) point.u = levels[l];
      point.value = mean;
      q.empirical_by_u.push_back(point);
      errors.push_back(std::abs(mean - q.closed_form));
    }
    q.abs_error = errors.back();
    q.pass = std::isfinite(q.abs_error) && q.abs_error <= q.tolerance;
    for (std::size_t l = 1; l < errors.size(); ++l) {
      if (!(errors[l] <= errors[l - 1] + 1e-12)) q.converging = false;
    }
    report.pass = report.pass && q.pass;
    report.quantities.push_back(std::move(q));
  }
  return report;
}

}  // namespace blockfi
