#include "idrl/records_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "idrl/error.hpp"

namespace idrl {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_input, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

long long to_integer(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_input, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
}

std::uint64_t to_unsigned(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_input, "line " + std::to_string(line) + ": bad seed '" + s + "'");
  }
}

template <class Row, class Parse>
std::vector<Row> read_rows(std::istream& in, const char* header, std::size_t columns, Parse parse) {
  std::string line;
  if (!std::getline(in, line) || line != header) fail(ErrorKind::invalid_input, "missing or unexpected CSV header");
  std::vector<Row> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns)
      fail(ErrorKind::invalid_input, "line " + std::to_string(n) + ": expected " + std::to_string(columns) + " fields");
    rows.push_back(parse(cells, n));
  }
  return rows;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordsHeader << '\n';
  out << std::setprecision(17);
  for (const auto& r : records)
    out << r.seed << ',' << r.iteration << ',' << r.acquisition << ',' << r.env << ',' << r.query_id << ','
        << r.response << ',' << r.regret << ',' << r.mse << ',' << r.cosine << ',' << r.wall_time_ms << '\n';
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  return read_rows<ExperimentRecord>(in, kRecordsHeader, 10, [](const std::vector<std::string>& c, int line) {
    ExperimentRecord r;
    r.seed = to_unsigned(c[0], line);
    r.iteration = static_cast<int>(to_integer(c[1], line));
    r.acquisition = c[2];
    r.env = c[3];
    r.query_id = static_cast<int>(to_integer(c[4], line));
    r.response = to_double(c[5], line);
    r.regret = to_double(c[6], line);
    r.mse = to_double(c[7], line);
    r.cosine = to_double(c[8], line);
    r.wall_time_ms = to_double(c[9], line);
    return r;
  });
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.acquisition << ',' << r.env << ',' << r.iteration << ',' << r.count << ',' << r.regret.mean << ','
        << r.regret.standard_error << ',' << r.mse.mean << ',' << r.mse.standard_error << ',' << r.cosine.mean << ','
        << r.cosine.standard_error << '\n';
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  return read_rows<SummaryRow>(in, kSummaryHeader, 10, [](const std::vector<std::string>& c, int line) {
    SummaryRow r;
    r.acquisition = c[0];
    r.env = c[1];
    r.iteration = static_cast<int>(to_integer(c[2], line));
    r.count = static_cast<int>(to_integer(c[3], line));
    r.regret = {to_double(c[4], line), to_double(c[5], line)};
    r.mse = {to_double(c[6], line), to_double(c[7], line)};
    r.cosine = {to_double(c[8], line), to_double(c[9], line)};
    return r;
  });
}

void write_records_file(const std::string& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::invalid_input, "cannot open '" + path + "' for writing");
  write_records_csv(out, records);
}

std::vector<ExperimentRecord> read_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::invalid_input, "cannot open '" + path + "'");
  return read_records_csv(in);
}

}  // namespace idrl
