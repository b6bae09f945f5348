#include "levelset/cli/csv.hpp"

#include "levelset/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace levelset::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

} // namespace

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double> &x) { return x ? format_double(*x) : ""; }

std::optional<double> parse_double(std::string_view text) {
  if (text == "inf")
    return std::numeric_limits<double>::infinity();
  if (text == "-inf")
    return -std::numeric_limits<double>::infinity();
  if (text == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    return std::nullopt;
  return v;
}

std::size_t NumericTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return i;
  throw CsvError("missing column '" + std::string(name) + "'");
}

NumericTable read_numeric_csv(std::istream &in, const std::string &source) {
  NumericTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    std::vector<std::string> fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw CsvError(source + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(table.header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string &f : fields) {
      const auto v = parse_double(f);
      if (!v)
        throw CsvError(source + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
      row.push_back(*v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw CsvError(source + ": missing header");
  return table;
}

NumericTable read_numeric_csv_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw CsvError("cannot open '" + path + "'");
  return read_numeric_csv(in, path);
}

void write_row(std::ostream &out, const std::vector<std::string> &fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i)
      out << ',';
    out << fields[i];
  }
  out << '\n';
}

namespace {

// Two-column table with header k and one of the given value names.
std::pair<Eigen::VectorXd, Eigen::VectorXd> read_levels(const std::string &path,
                                                        std::initializer_list<const char *> names) {
  const NumericTable t = read_numeric_csv_file(path);
  if (t.header.size() != 2 || t.header[0] != "k")
    throw CsvError(path + ": expected a header 'k,psi' or 'k,measure'");
  bool known = false;
  for (const char *n : names)
    known = known || t.header[1] == n;
  if (!known)
    throw CsvError(path + ": unexpected value column '" + t.header[1] + "'");
  Eigen::VectorXd k(static_cast<Eigen::Index>(t.rows.size()));
  Eigen::VectorXd v(k.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    k[static_cast<Eigen::Index>(i)] = t.rows[i][0];
    v[static_cast<Eigen::Index>(i)] = t.rows[i][1];
    if (!std::isfinite(t.rows[i][0]) || !std::isfinite(t.rows[i][1]))
      throw CsvError(path + ": row " + std::to_string(i + 1) + " is not finite");
    if (i > 0 && !(t.rows[i][0] > t.rows[i - 1][0]))
      throw CsvError(path + ": rows are not sorted by strictly increasing k (row " +
                     std::to_string(i + 1) + ")");
  }
  return {std::move(k), std::move(v)};
}

} // namespace

PsiTable read_psi_table(const std::string &path, double k0) {
  auto [k, v] = read_levels(path, {"psi", "measure"});
  if (k.size() == 0)
    throw CsvError(path + ": no rows");
  try {
    return PsiTable(std::move(k), std::move(v), k0);
  } catch (const DomainError &e) {
    throw CsvError(path + ": " + e.what());
  }
}

DistributionProfile read_profile(const std::string &path) {
  auto [k, v] = read_levels(path, {"measure"});
  if (k.size() == 0)
    throw CsvError(path + ": no rows");
  DistributionProfile p;
  p.total_measure = v[0];
  p.levels = std::move(k);
  p.measures = std::move(v);
  return p;
}

} // namespace levelset::cli
