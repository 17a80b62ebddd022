#include "blockfi/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "blockfi/error.hpp"

namespace blockfi {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

LoadedCsv read_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::data, source + ": empty file, header row expected");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = split(line);
  const bool dated = !header.empty() && header.front() == "date";
  if (dated) header.erase(header.begin());
  if (header.empty()) fail(ErrorKind::data, source + ": header has no data columns");
  for (const auto& h : header) {
    if (h.empty()) fail(ErrorKind::data, source + ": empty column name in header");
  }
  const std::size_t width = header.size() + (dated ? 1 : 0);

  std::vector<double> values;
  std::vector<Date> dates;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != width) {
      fail(ErrorKind::data, source + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(width) + " fields, found " +
                                std::to_string(cells.size()));
    }
    std::optional<Date> date;
    if (dated) {
      date = parse_date(cells.front());
      if (!date) {
        fail(ErrorKind::data, source + ":" + std::to_string(line_no) + ": unparseable date '" +
                                  cells.front() + "'");
      }
    }
    std::vector<double> row;
    for (std::size_t c = dated ? 1 : 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) break;
      row.push_back(*v);
    }
    if (row.size() != header.size()) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    if (dated) dates.push_back(*date);
  }
  const std::size_t n = values.size() / header.size();
  if (n < 2) {
    fail(ErrorKind::data, source + ": fewer than 2 usable rows (" + std::to_string(dropped) +
                              " dropped for missing values)");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * header.size() + c];
    }
  }
  try {
    if (dated) return {Dataset(std::move(m), std::move(header), std::move(dates)), dropped};
    return {Dataset(std::move(m), std::move(header)), dropped};
  } catch (const Error& e) {
    fail(ErrorKind::data, source + ": " + e.what());
  }
}

LoadedCsv load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  if (data.has_dates()) out << "date,";
  for (std::size_t c = 0; c < data.cols(); ++c) out << (c ? "," : "") << data.labels()[c];
  out << '\n';
  std::array<char, 32> buf{};
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (data.has_dates()) out << format_date(data.dates()[r]) << ',';
    for (std::size_t c = 0; c < data.cols(); ++c) {
      const double v = data.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out << (c ? "," : "") << std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
    }
    out << '\n';
  }
}

Dataset neg_log_returns(const Dataset& prices) {
  const std::size_t n = prices.rows();
  if (n < 3) fail(ErrorKind::data, "negative log-returns need at least 3 price rows");
  const auto& p = prices.values();
  if (!(p.array() > 0.0).all()) {
    fail(ErrorKind::data, "prices must be strictly positive for log-returns");
  }
  const auto rows = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd r = -(p.bottomRows(rows).array() / p.topRows(rows).array()).log();
  std::vector<std::string> labels(prices.labels().begin(), prices.labels().end());
  if (!prices.has_dates()) return Dataset(std::move(r), std::move(labels));
  std::vector<Date> dates(prices.dates().begin() + 1, prices.dates().end());
  return Dataset(std::move(r), std::move(labels), std::move(dates));
}

MonthlyMaxima monthly_block_maxima(const Dataset& data, std::size_t min_obs) {
  if (!data.has_dates()) {
    fail(ErrorKind::configuration, "monthly maxima need a date column");
  }
  const auto dates = data.dates();
  const auto& v = data.values();
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<Date> row_dates;
  std::size_t dropped = 0;
  std::size_t start = 0;
  while (start < data.rows()) {
    const auto ym = dates[start].year() / dates[start].month();
    std::size_t end = start;
    while (end < data.rows() && dates[end].year() / dates[end].month() == ym) ++end;
    if (end - start >= min_obs) {
      rows.push_back(v.middleRows(static_cast<Eigen::Index>(start),
                                  static_cast<Eigen::Index>(end - start))
                         .colwise()
                         .maxCoeff());
      row_dates.push_back(dates[end - 1]);
    } else {
      ++dropped;
    }
    start = end;
  }
  if (rows.size() < 2) {
    fail(ErrorKind::data, "fewer than 2 complete months after applying min_obs = " +
                              std::to_string(min_obs));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), v.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r];
  return {Dataset(std::move(m), {data.labels().begin(), data.labels().end()}, std::move(row_dates)),
          dropped};
}

}  // namespace blockfi
