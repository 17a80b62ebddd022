#include "blockfi/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "blockfi/error.hpp"

namespace blockfi {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::data: return "data error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::incomplete_input: return "incomplete input";
    case ErrorKind::inconsistent_coefficients: return "inconsistent coefficients";
    case ErrorKind::undefined_limit: return "undefined limit";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "error";
}

// SubsetKey ------------------------------------------------------------------

SubsetKey::SubsetKey(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (indices_.empty()) fail(ErrorKind::invalid_argument, "subset must be nonempty");
  if (indices_.front() == 0) fail(ErrorKind::invalid_argument, "coordinate indices are 1-based");
}

SubsetKey::SubsetKey(std::vector<std::size_t> indices, std::size_t d)
    : SubsetKey(std::move(indices)) {
  if (indices_.back() > d) {
    fail(ErrorKind::invalid_argument,
         "coordinate index " + std::to_string(indices_.back()) + " exceeds dimension " +
             std::to_string(d));
  }
}

SubsetKey SubsetKey::full(std::size_t d) {
  std::vector<std::size_t> all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = i + 1;
  return SubsetKey(std::move(all));
}

bool SubsetKey::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool SubsetKey::is_subset_of(const SubsetKey& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

SubsetKey SubsetKey::unite(const SubsetKey& other) const {
  std::vector<std::size_t> merged;
  merged.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(merged));
  return SubsetKey(std::move(merged));
}

std::string SubsetKey::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out << ',';
    out << indices_[i];
  }
  out << '}';
  return out.str();
}

// Partition ------------------------------------------------------------------

Partition::Partition(std::size_t d, std::vector<Block> blocks)
    : d_(d), blocks_(std::move(blocks)), owner_(d, 0) {
  if (d_ == 0) fail(ErrorKind::invalid_argument, "dimension must be positive");
  if (blocks_.empty()) fail(ErrorKind::invalid_argument, "partition needs at least one block");
  if (blocks_.size() > kMaxBlocks) {
    fail(ErrorKind::invalid_argument,
         "partition has " + std::to_string(blocks_.size()) + " blocks; at most " +
             std::to_string(kMaxBlocks) + " are supported (2^s subset enumeration)");
  }
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    auto& members = blocks_[j].members;
    if (members.empty()) {
      fail(ErrorKind::invalid_argument, "block '" + blocks_[j].name + "' is empty");
    }
    std::sort(members.begin(), members.end());
    for (std::size_t i : members) {
      if (i == 0 || i > d_) {
        fail(ErrorKind::invalid_argument,
             "block '" + blocks_[j].name + "' has out-of-range index " + std::to_string(i));
      }
      if (owner_[i - 1] != 0) {
        fail(ErrorKind::invalid_argument,
             "coordinate " + std::to_string(i) + " belongs to more than one block");
      }
      owner_[i - 1] = j + 1;
    }
  }
  for (std::size_t i = 0; i < d_; ++i) {
    if (owner_[i] == 0) {
      fail(ErrorKind::invalid_argument,
           "coordinate " + std::to_string(i + 1) + " is not covered by any block");
    }
  }
}

Partition Partition::from_members(std::size_t d,
                                  const std::vector<std::vector<std::size_t>>& members) {
  std::vector<Block> blocks;
  blocks.reserve(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    blocks.push_back({"B" + std::to_string(j + 1), members[j]});
  }
  return Partition(d, std::move(blocks));
}

Partition Partition::singletons(std::size_t d) {
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 1; i <= d; ++i) members.push_back({i});
  return from_members(d, members);
}

Partition Partition::single_block(std::size_t d) {
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{1});
  return from_members(d, {all});
}

const Block& Partition::block(std::size_t position) const {
  if (position == 0 || position > blocks_.size()) {
    fail(ErrorKind::invalid_argument, "block position " + std::to_string(position) +
                                          " out of range 1.." + std::to_string(blocks_.size()));
  }
  return blocks_[position - 1];
}

BlockMask Partition::full_mask() const noexcept {
  return static_cast<BlockMask>((BlockMask{1} << blocks_.size()) - 1);
}

SubsetKey Partition::union_of(BlockMask mask) const {
  if (mask == 0 || (mask & ~full_mask()) != 0) {
    fail(ErrorKind::invalid_argument, "block selection is empty or out of range");
  }
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (mask & (BlockMask{1} << j)) {
      members.insert(members.end(), blocks_[j].members.begin(), blocks_[j].members.end());
    }
  }
  return SubsetKey(std::move(members));
}

std::size_t Partition::block_of(std::size_t index) const {
  if (index == 0 || index > d_) {
    fail(ErrorKind::invalid_argument, "coordinate index out of range");
  }
  return owner_[index - 1];
}

BlockMask block_mask(const Partition& partition, std::span<const std::size_t> block_indices) {
  if (block_indices.empty()) fail(ErrorKind::invalid_argument, "empty block selection");
  BlockMask mask = 0;
  for (std::size_t j : block_indices) {
    if (j == 0 || j > partition.size()) {
      fail(ErrorKind::invalid_argument, "block position " + std::to_string(j) +
                                            " out of range 1.." +
                                            std::to_string(partition.size()));
    }
    mask |= BlockMask{1} << (j - 1);
  }
  return mask;
}

std::vector<std::size_t> mask_positions(BlockMask mask) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; mask != 0; ++j, mask >>= 1) {
    if (mask & 1u) out.push_back(j + 1);
  }
  return out;
}

SubsetKey blocks_union(const Partition& partition, std::span<const std::size_t> block_indices) {
  return partition.union_of(block_mask(partition, block_indices));
}

Partition validate_partition(std::span<const std::string> labels,
                             std::span<const BlockConfig> blocks_config) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!position.emplace(labels[i], i + 1).second) {
      fail(ErrorKind::configuration, "duplicate column label '" + labels[i] + "'");
    }
  }
  if (blocks_config.empty()) fail(ErrorKind::configuration, "no blocks configured");
  if (blocks_config.size() > kMaxBlocks) {
    fail(ErrorKind::configuration, "too many blocks (max " + std::to_string(kMaxBlocks) + ")");
  }

  std::map<std::string, std::string> assigned;  // label -> block name
  std::set<std::string> names;
  std::vector<Block> blocks;
  for (const auto& cfg : blocks_config) {
    if (!names.insert(cfg.name).second) {
      fail(ErrorKind::configuration, "duplicate block name '" + cfg.name + "'");
    }
    if (cfg.members.empty()) fail(ErrorKind::configuration, "block '" + cfg.name + "' is empty");
    Block block{cfg.name, {}};
    for (const auto& label : cfg.members) {
      auto it = position.find(label);
      if (it == position.end()) {
        fail(ErrorKind::configuration,
             "block '" + cfg.name + "' references unknown label '" + label + "'");
      }
      auto [prev, inserted] = assigned.emplace(label, cfg.name);
      if (!inserted) {
        fail(ErrorKind::configuration, "label '" + label + "' is in both '" + prev->second +
                                           "' and '" + cfg.name + "'");
      }
      block.members.push_back(it->second);
    }
    blocks.push_back(std::move(block));
  }
  for (const auto& label : labels) {
    if (!assigned.contains(label)) {
      fail(ErrorKind::configuration, "column '" + label + "' is not covered by any block");
    }
  }
  return Partition(labels.size(), std::move(blocks));
}

// MarginSpec -----------------------------------------------------------------

MarginSpec::MarginSpec(MarginMode mode, std::vector<double> gamma)
    : mode_(mode), gamma_(std::move(gamma)) {}

MarginSpec MarginSpec::identical(std::size_t d) {
  if (d == 0) fail(ErrorKind::invalid_argument, "dimension must be positive");
  return MarginSpec(MarginMode::identical, std::vector<double>(d, 1.0));
}

MarginSpec MarginSpec::equivalent(std::vector<double> gamma) {
  if (gamma.empty()) fail(ErrorKind::invalid_argument, "gamma must be nonempty");
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      fail(ErrorKind::invalid_argument, "tail-equivalence constants must lie in (0, inf)");
    }
  }
  return MarginSpec(MarginMode::equivalent, std::move(gamma));
}

// Dataset --------------------------------------------------------------------

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> labels,
                 std::optional<std::vector<Date>> dates)
    : values_(std::move(values)), labels_(std::move(labels)), dates_(std::move(dates)) {
  if (labels_.size() != cols()) {
    fail(ErrorKind::data, "label count does not match column count");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) fail(ErrorKind::data, "duplicate column label '" + l + "'");
  }
  if (dates_) {
    if (dates_->size() != rows()) fail(ErrorKind::data, "date count does not match row count");
    if (!std::is_sorted(dates_->begin(), dates_->end())) {
      fail(ErrorKind::data, "dates must be non-decreasing");
    }
  }
}

std::span<const Date> Dataset::dates() const {
  if (!dates_) fail(ErrorKind::configuration, "dataset has no dates");
  return *dates_;
}

std::optional<std::size_t> Dataset::column_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

Dataset Dataset::select(std::span<const std::string> labels) const {
  Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t c = 0; c < labels.size(); ++c) {
    auto col = column_of(labels[c]);
    if (!col) fail(ErrorKind::configuration, "unknown column '" + labels[c] + "'");
    out.col(static_cast<Eigen::Index>(c)) = values_.col(static_cast<Eigen::Index>(*col));
  }
  return Dataset(std::move(out), {labels.begin(), labels.end()}, dates_);
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::optional<Date> parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

}  // namespace blockfi
