#ifndef LEVELSET_CLI_CSV_HPP
#define LEVELSET_CLI_CSV_HPP

#include "levelset/lemma.hpp"
#include "levelset/marcinkiewicz.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace levelset::cli {

/// Malformed CSV input; maps to exit code 2.
class CsvError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);
std::string format_optional(const std::optional<double> &x);

/// Strict parse of a whole field as a double.
std::optional<double> parse_double(std::string_view text);

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const; ///< throws CsvError if absent
};

NumericTable read_numeric_csv(std::istream &in, const std::string &source);
NumericTable read_numeric_csv_file(const std::string &path);

void write_row(std::ostream &out, const std::vector<std::string> &fields);

/// Reads "k,psi" or "k,measure" (the profile.csv format); knots must be
/// strictly increasing.
PsiTable read_psi_table(const std::string &path, double k0);

/// Reads a profile.csv back into a distribution profile. The total measure
/// is taken from the first row, which is level 0 in files written by minimize.
DistributionProfile read_profile(const std::string &path);

} // namespace levelset::cli

#endif // LEVELSET_CLI_CSV_HPP
