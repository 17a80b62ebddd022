#pragma once

// Index-set algebra, partitions, margin specifications and datasets.
//
// Coordinate indices are 1-based at every public boundary. Block positions
// are 1-based as well when passed as index lists; inside the library a set
// of blocks is a BlockMask where bit (j - 1) selects block j.

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace blockfi {

using BlockMask = std::uint32_t;

/// Inclusion-exclusion sums enumerate 2^s block subsets; s is capped here.
inline constexpr std::size_t kMaxBlocks = 20;

/// Nonempty sorted set of 1-based coordinate indices.
class SubsetKey {
 public:
  explicit SubsetKey(std::vector<std::size_t> indices);
  SubsetKey(std::vector<std::size_t> indices, std::size_t d);

  static SubsetKey full(std::size_t d);

  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool contains(std::size_t index) const;
  bool is_subset_of(const SubsetKey& other) const;
  SubsetKey unite(const SubsetKey& other) const;
  std::string to_string() const;

  friend auto operator<=>(const SubsetKey&, const SubsetKey&) = default;
  friend bool operator==(const SubsetKey&, const SubsetKey&) = default;

 private:
  std::vector<std::size_t> indices_;
};

struct Block {
  std::string name;
  std::vector<std::size_t> members;  // sorted, 1-based
};

/// Ordered disjoint blocks covering {1..d}. Immutable after construction.
class Partition {
 public:
  Partition(std::size_t d, std::vector<Block> blocks);

  /// Unnamed blocks get the names B1, B2, ...
  static Partition from_members(std::size_t d,
                                const std::vector<std::vector<std::size_t>>& members);
  /// The partition into d singletons {1}, ..., {d}.
  static Partition singletons(std::size_t d);
  static Partition single_block(std::size_t d);

  std::size_t dimension() const noexcept { return d_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  std::span<const Block> blocks() const noexcept { return blocks_; }
  const Block& block(std::size_t position) const;  // 1-based
  std::size_t block_size(std::size_t position) const { return block(position).members.size(); }

  BlockMask full_mask() const noexcept;
  /// Union of the member sets of the blocks selected by `mask`.
  SubsetKey union_of(BlockMask mask) const;
  /// 1-based position of the block holding coordinate `index`.
  std::size_t block_of(std::size_t index) const;

 private:
  std::size_t d_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> owner_;  // owner_[i - 1] = block position of coordinate i
};

/// Union of the blocks at the given 1-based positions.
SubsetKey blocks_union(const Partition& partition, std::span<const std::size_t> block_indices);

/// Converts 1-based block positions to a mask; rejects empty or out-of-range input.
BlockMask block_mask(const Partition& partition, std::span<const std::size_t> block_indices);
/// 1-based block positions selected by a mask, ascending.
std::vector<std::size_t> mask_positions(BlockMask mask);

struct BlockConfig {
  std::string name;
  std::vector<std::string> members;
};

/// Maps label-based block definitions onto positional indices.
Partition validate_partition(std::span<const std::string> labels,
                             std::span<const BlockConfig> blocks_config);

enum class MarginMode { identical, equivalent };

/// Tail-equivalence constants gamma_i of the margins.
class MarginSpec {
 public:
  static MarginSpec identical(std::size_t d);
  static MarginSpec equivalent(std::vector<double> gamma);

  MarginMode mode() const noexcept { return mode_; }
  std::span<const double> gamma() const noexcept { return gamma_; }
  std::size_t dimension() const noexcept { return gamma_.size(); }

 private:
  MarginSpec(MarginMode mode, std::vector<double> gamma);

  MarginMode mode_;
  std::vector<double> gamma_;
};

using Date = std::chrono::year_month_day;

/// n x d numeric matrix with column labels and optional row dates.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd values, std::vector<std::string> labels,
          std::optional<std::vector<Date>> dates = std::nullopt);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  std::span<const std::string> labels() const noexcept { return labels_; }
  bool has_dates() const noexcept { return dates_.has_value(); }
  std::span<const Date> dates() const;

  /// 0-based column position of a label.
  std::optional<std::size_t> column_of(const std::string& label) const;
  /// Columns reordered/subset by label; dates are kept.
  Dataset select(std::span<const std::string> labels) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> labels_;
  std::optional<std::vector<Date>> dates_;
};

std::string format_date(const Date& date);
/// Parses YYYY-MM-DD; returns nullopt on malformed or invalid dates.
std::optional<Date> parse_date(const std::string& text);

}  // namespace blockfi
