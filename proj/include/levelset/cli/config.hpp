#ifndef LEVELSET_CLI_CONFIG_HPP
#define LEVELSET_CLI_CONFIG_HPP

#include "levelset/exponents.hpp"
#include "levelset/lemma.hpp"
#include "levelset/variational.hpp"

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levelset::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProblemSection {
  ProblemParams params;
  double source_scale = 1.0;
};

struct GridSection {
  double radius = 1.0;
  Eigen::Index cells = 1024;
  int refinement_levels = 3; ///< runs on cells, 2 cells, ... (levels grids)

  std::vector<Eigen::Index> cell_counts() const;
};

struct SolverSection {
  double epsilon = 1e-6;
  SolverTolerances tolerances;
};

enum class StrategyName { AllPairs, Doubling, Random };

struct LemmaSection {
  DecayHypothesis hyp;
  double tolerance = kDefaultCaseTolerance;
  double psi_k0 = 1.0;
  bool psi_k0_given = false;
  StrategyName strategy = StrategyName::AllPairs;
  std::size_t random_pairs = 1000;
  std::uint64_t seed = 0;

  PairStrategy pair_strategy() const;
};

struct OutputSection {
  std::string directory = ".";
  int level_density = 32;
  int level_decades = 3;
};

struct CounterexampleSection {
  double c_exp = 2.0;  ///< C in exp(-k^p), p = log2(2C)
  double d_exp = 2.0;  ///< D of the doubling inequality
  int levels = 41;     ///< dyadic levels 2^0 .. 2^(levels-1)
  double k_max = 1e60; ///< end of the envelope-violation sweep
};

struct SweepSection {
  std::vector<double> r_values;
};

/// Sections absent from the file stay empty; commands check what they need.
struct RunConfig {
  std::optional<ProblemSection> problem;
  std::optional<GridSection> grid;
  std::optional<SolverSection> solver;
  std::optional<LemmaSection> lemma;
  OutputSection output;
  std::optional<CounterexampleSection> counterexample;
  std::optional<SweepSection> sweep;
};

/// Line-oriented "key = value" under "[section]" headers; '#' starts a
/// comment. Unknown sections or keys, duplicates and missing required keys
/// are errors naming the offending key.
RunConfig parse_config(std::istream &in, const std::string &source = "<config>");
RunConfig load_config(const std::string &path);

} // namespace levelset::cli

#endif // LEVELSET_CLI_CONFIG_HPP
