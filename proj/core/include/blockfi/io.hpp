#pragma once

// CSV ingestion and the return/maxima preprocessing used before estimation.

#include <cstddef>
#include <iosfwd>
#include <string>

#include "blockfi/core.hpp"

namespace blockfi {

struct LoadedCsv {
  Dataset data;
  std::size_t rows_dropped = 0;  // rows with a missing or non-numeric cell
};

/// Header row required; a first column named "date" (YYYY-MM-DD) is attached
/// as row dates. Rows with a non-numeric cell are deleted listwise.
LoadedCsv read_csv(std::istream& in, const std::string& source = "<stream>");
LoadedCsv load_csv(const std::string& path);

void write_csv(std::ostream& out, const Dataset& data);

/// Row t becomes -log(P_t / P_{t-1}); dates move to the later row.
Dataset neg_log_returns(const Dataset& prices);

struct MonthlyMaxima {
  Dataset data;
  std::size_t months_dropped = 0;
};

/// Componentwise maxima per calendar month; months with fewer than
/// min_obs rows are dropped. Each row is dated by the month's last observation.
MonthlyMaxima monthly_block_maxima(const Dataset& data, std::size_t min_obs = 10);

}  // namespace blockfi
