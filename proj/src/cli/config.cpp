#include "levelset/cli/config.hpp"

#include "levelset/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace levelset::cli {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Consumes keys from one section; whatever is left over is unknown.
class Reader {
public:
  Reader(std::string name, Section entries, std::string source)
      : name_(std::move(name)), entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string &key) const { return entries_.count(key) > 0; }

  double real(const std::string &key, std::optional<double> fallback = std::nullopt) {
    const auto text = take(key, fallback.has_value());
    if (!text)
      return *fallback;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
      fail(key, "expected a number, got '" + *text + "'");
    return v;
  }

  long integer(const std::string &key, std::optional<long> fallback = std::nullopt) {
    const auto text = take(key, fallback.has_value());
    if (!text)
      return *fallback;
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
      fail(key, "expected an integer, got '" + *text + "'");
    return v;
  }

  std::string word(const std::string &key, const std::string &fallback) {
    const auto text = take(key, true);
    return text ? *text : fallback;
  }

  std::vector<double> reals(const std::string &key) {
    const auto text = take(key, false);
    std::vector<double> out;
    std::string_view rest = *text;
    while (true) {
      const auto comma = rest.find(',');
      const std::string item = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
        fail(key, "expected a comma-separated list of numbers, got '" + *text + "'");
      out.push_back(v);
      if (comma == std::string_view::npos)
        break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  void finish() const {
    if (!entries_.empty()) {
      const auto &[key, entry] = *entries_.begin();
      throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                        "' in [" + name_ + "]");
    }
  }

  [[noreturn]] void fail(const std::string &key, const std::string &what) const {
    throw ConfigError(source_ + ": [" + name_ + "] " + key + ": " + what);
  }

private:
  std::optional<std::string> take(const std::string &key, bool optional) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      if (!optional)
        fail(key, "required key is missing");
      return std::nullopt;
    }
    std::string v = it->second.value;
    entries_.erase(it);
    return v;
  }

  std::string name_;
  Section entries_;
  std::string source_;
};

ProblemSection read_problem(Reader &r) {
  ProblemSection s;
  s.params.n = static_cast<int>(r.integer("n"));
  s.params.p = r.real("p");
  s.params.alpha = r.real("alpha");
  s.params.r = r.real("r");
  s.params.beta1 = r.real("beta1", 1.0);
  s.params.b_const = r.real("b_const", 1.0);
  s.source_scale = r.real("source_scale", 1.0);
  r.finish();
  try {
    validate(s.params);
  } catch (const DomainError &e) {
    throw ConfigError(std::string("[problem] ") + e.what());
  }
  if (!(s.source_scale >= 0.0))
    r.fail("source_scale", "must be nonnegative");
  return s;
}

GridSection read_grid(Reader &r) {
  GridSection s;
  s.radius = r.real("radius", s.radius);
  s.cells = r.integer("cells", s.cells);
  s.refinement_levels = static_cast<int>(r.integer("refinement_levels", s.refinement_levels));
  r.finish();
  if (!(s.radius > 0.0))
    r.fail("radius", "must be positive");
  if (s.cells < 1)
    r.fail("cells", "must be at least 1");
  if (s.refinement_levels < 1 || s.refinement_levels > 12)
    r.fail("refinement_levels", "must be between 1 and 12");
  return s;
}

SolverSection read_solver(Reader &r) {
  SolverSection s;
  s.epsilon = r.real("epsilon", s.epsilon);
  s.tolerances.max_iters = static_cast<int>(r.integer("max_iters", s.tolerances.max_iters));
  s.tolerances.grad_tol = r.real("grad_tol", s.tolerances.grad_tol);
  s.tolerances.step_init = r.real("step_init", s.tolerances.step_init);
  s.tolerances.armijo_factor = r.real("armijo", s.tolerances.armijo_factor);
  r.finish();
  if (!(s.epsilon >= 0.0))
    r.fail("epsilon", "must be nonnegative");
  if (s.tolerances.max_iters < 0)
    r.fail("max_iters", "must be nonnegative");
  if (!(s.tolerances.grad_tol > 0.0))
    r.fail("grad_tol", "must be positive");
  if (!(s.tolerances.step_init > 0.0))
    r.fail("step_init", "must be positive");
  if (!(s.tolerances.armijo_factor > 0.0 && s.tolerances.armijo_factor < 1.0))
    r.fail("armijo", "must lie in (0, 1)");
  return s;
}

LemmaSection read_lemma(Reader &r) {
  LemmaSection s;
  s.hyp.c1 = r.real("c1");
  s.hyp.A = r.real("A");
  s.hyp.B = r.real("B");
  s.hyp.C = r.real("C");
  s.hyp.D = r.real("D");
  s.hyp.k0 = r.real("k0", 0.0);
  s.tolerance = r.real("tolerance", s.tolerance);
  if (r.has("psi_k0")) {
    s.psi_k0 = r.real("psi_k0");
    s.psi_k0_given = true;
  }
  const std::string strategy = r.word("strategy", "all_pairs");
  if (strategy == "all_pairs")
    s.strategy = StrategyName::AllPairs;
  else if (strategy == "doubling")
    s.strategy = StrategyName::Doubling;
  else if (strategy == "random")
    s.strategy = StrategyName::Random;
  else
    r.fail("strategy", "expected all_pairs, doubling or random, got '" + strategy + "'");
  const long pairs = r.integer("random_pairs", static_cast<long>(s.random_pairs));
  const long seed = r.integer("seed", 0);
  r.finish();
  if (pairs < 1)
    r.fail("random_pairs", "must be positive");
  if (seed < 0)
    r.fail("seed", "must be nonnegative");
  s.random_pairs = static_cast<std::size_t>(pairs);
  s.seed = static_cast<std::uint64_t>(seed);
  if (!(s.tolerance >= 0.0))
    r.fail("tolerance", "must be nonnegative");
  if (!(s.psi_k0 >= 0.0))
    r.fail("psi_k0", "must be nonnegative");
  try {
    validate(s.hyp);
  } catch (const DomainError &e) {
    throw ConfigError(std::string("[lemma] ") + e.what());
  }
  return s;
}

OutputSection read_output(Reader &r) {
  OutputSection s;
  s.directory = r.word("directory", s.directory);
  s.level_density = static_cast<int>(r.integer("level_density", s.level_density));
  s.level_decades = static_cast<int>(r.integer("level_decades", s.level_decades));
  r.finish();
  if (s.level_density < 1)
    r.fail("level_density", "must be positive");
  if (s.level_decades < 1)
    r.fail("level_decades", "must be positive");
  return s;
}

CounterexampleSection read_counterexample(Reader &r) {
  CounterexampleSection s;
  s.c_exp = r.real("c_exp", s.c_exp);
  s.d_exp = r.real("d_exp", s.d_exp);
  s.levels = static_cast<int>(r.integer("levels", s.levels));
  s.k_max = r.real("k_max", s.k_max);
  r.finish();
  if (!(s.d_exp > 0.0))
    r.fail("d_exp", "must be positive");
  if (s.levels < 2 || s.levels > 1000)
    r.fail("levels", "must be between 2 and 1000");
  if (!(s.k_max > 1.0))
    r.fail("k_max", "must exceed 1");
  return s;
}

SweepSection read_sweep(Reader &r) {
  SweepSection s;
  s.r_values = r.reals("r_values");
  r.finish();
  return s;
}

} // namespace

std::vector<Eigen::Index> GridSection::cell_counts() const {
  std::vector<Eigen::Index> out;
  for (int i = 0; i < refinement_levels; ++i)
    out.push_back(cells << i);
  return out;
}

PairStrategy LemmaSection::pair_strategy() const {
  switch (strategy) {
  case StrategyName::Doubling:
    return Doubling{};
  case StrategyName::Random:
    return RandomPairs{random_pairs, seed};
  case StrategyName::AllPairs:
    break;
  }
  return AllKnotPairs{};
}

RunConfig parse_config(std::istream &in, const std::string &source) {
  static const std::set<std::string> known{"problem", "grid",           "solver", "lemma",
                                           "output",  "counterexample", "sweep"};
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty())
      continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known.count(current))
        throw ConfigError(where + "unknown section [" + current + "]");
      if (sections.count(current))
        throw ConfigError(where + "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + "expected 'key = value'");
    if (current.empty())
      throw ConfigError(where + "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(where + "expected 'key = value'");
    if (!sections[current].emplace(key, Entry{value, line_no}).second)
      throw ConfigError(where + "duplicate key '" + key + "' in [" + current + "]");
  }

  RunConfig config;
  auto reader = [&](const std::string &name) { return Reader(name, sections[name], source); };
  if (sections.count("problem")) {
    Reader r = reader("problem");
    config.problem = read_problem(r);
  }
  if (sections.count("grid")) {
    Reader r = reader("grid");
    config.grid = read_grid(r);
  }
  if (sections.count("solver")) {
    Reader r = reader("solver");
    config.solver = read_solver(r);
  }
  if (sections.count("lemma")) {
    Reader r = reader("lemma");
    config.lemma = read_lemma(r);
  }
  if (sections.count("output")) {
    Reader r = reader("output");
    config.output = read_output(r);
  }
  if (sections.count("counterexample")) {
    Reader r = reader("counterexample");
    config.counterexample = read_counterexample(r);
  }
  if (sections.count("sweep")) {
    Reader r = reader("sweep");
    config.sweep = read_sweep(r);
  }
  return config;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

} // namespace levelset::cli
