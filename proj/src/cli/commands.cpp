#include "levelset/cli/commands.hpp"

#include "levelset/cli/csv.hpp"
#include "levelset/counterexamples.hpp"
#include "levelset/errors.hpp"
#include "levelset/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace levelset::cli {

namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

template <class T> const T &require(const std::optional<T> &section, const char *name) {
  if (!section)
    throw ConfigError(std::string("config has no [") + name + "] section");
  return *section;
}

ExperimentConfig experiment_config(const RunConfig &config) {
  const ProblemSection &problem = require(config.problem, "problem");
  const GridSection grid = config.grid.value_or(GridSection{});
  const SolverSection solver = config.solver.value_or(SolverSection{});
  ExperimentConfig ec;
  ec.params = problem.params;
  ec.source_scale = problem.source_scale;
  ec.radius = grid.radius;
  ec.cells = grid.cell_counts();
  ec.epsilon = solver.epsilon;
  ec.solver = solver.tolerances;
  ec.level_density = config.output.level_density;
  ec.level_decades = config.output.level_decades;
  return ec;
}

std::ofstream open_output(const std::string &directory, const std::string &name) {
  std::filesystem::create_directories(directory);
  const std::string path = (std::filesystem::path(directory) / name).string();
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write '" + path + "'");
  return out;
}

void print_hypothesis_check(std::ostream &out, const std::string &label, const HypothesisReport &r) {
  write_row(out, {"check", "holds", "max_ratio", "pairs", "violations"});
  write_row(out, {label, yes_no(r.holds()), format_double(r.max_ratio), std::to_string(r.pairs_checked),
                  std::to_string(r.violation_count)});
}

void print_violations(std::ostream &out, const HypothesisReport &r) {
  if (r.violations.empty())
    return;
  out << '\n';
  write_row(out, {"violation", "k", "h", "ratio"});
  for (const PairViolation &v : r.violations)
    write_row(out, {"hypothesis", format_double(v.k), format_double(v.h), format_double(v.ratio)});
}

std::vector<std::string> fit_fields(const std::optional<LinearFit> &fit) {
  if (!fit)
    return {"", "", "", ""};
  return {format_double(fit->slope), format_double(fit->intercept), format_double(fit->r_squared),
          std::to_string(fit->points)};
}

} // namespace

int cmd_constants(const RunConfig &config, std::ostream &out) {
  const LemmaSection &lemma = require(config.lemma, "lemma");
  const CaseClass cls = classify(lemma.hyp, lemma.tolerance);
  write_row(out, {"case", "lambda", "M", "c_bar", "tau", "L"});
  if (cls.tag == DecayCase::Unclassified) {
    write_row(out, {std::string(to_string(cls.tag)), "", "", "", "", ""});
    return kViolation;
  }
  const EnvelopeConstants c = envelope_constants(lemma.hyp, lemma.psi_k0, lemma.tolerance);
  write_row(out, {std::string(to_string(cls.tag)), format_optional(c.lambda), format_optional(c.M),
                  format_optional(c.c_bar), format_optional(c.tau), format_optional(c.L)});
  return kSuccess;
}

int cmd_exponents(const RunConfig &config, std::ostream &out) {
  const ProblemParams &p = require(config.problem, "problem").params;
  const ExponentSet e = compute_exponents(p);
  write_row(out, {"n", "p", "alpha", "r", "q", "q_star", "r_low", "r_mid", "r_high", "A", "B", "C", "D",
                  "s", "rho", "regime"});
  write_row(out, {std::to_string(p.n), format_double(p.p), format_double(p.alpha), format_double(p.r),
                  format_double(e.q), format_double(e.q_star), format_double(e.r_low),
                  format_double(e.r_mid), format_double(e.r_high), format_double(e.hyp.A),
                  format_double(e.hyp.B), format_double(e.hyp.C), format_double(e.hyp.D),
                  format_optional(e.s), format_optional(e.rho),
                  std::string(to_string(classify_regime(p)))});
  return kSuccess;
}

int cmd_verify(const RunConfig &config, const std::string &psi_path, std::ostream &out) {
  const LemmaSection &lemma = require(config.lemma, "lemma");
  if (psi_path.empty())
    throw ConfigError("verify needs --psi");
  const PsiTable table = read_psi_table(psi_path, lemma.hyp.k0);

  double psi0 = lemma.psi_k0;
  if (!lemma.psi_k0_given) {
    if (table.knots()[0] != lemma.hyp.k0)
      throw ConfigError("[lemma] psi_k0 is required when the table does not start at k0");
    psi0 = table.values()[0];
  }

  const HypothesisReport hyp = check_hypothesis(table, lemma.hyp, lemma.pair_strategy());
  print_hypothesis_check(out, "hypothesis", hyp);

  bool envelope_holds = true;
  std::optional<double> first;
  const CaseClass cls = classify(lemma.hyp, lemma.tolerance);
  if (cls.tag == DecayCase::Unclassified) {
    write_row(out, {"envelope", "", "", "0", "0"});
  } else {
    const EnvelopeReport env = check_envelope(table, lemma.hyp, psi0, lemma.tolerance);
    envelope_holds = env.holds();
    first = env.first_violation;
    write_row(out, {"envelope", yes_no(env.holds()), format_double(env.max_ratio),
                    std::to_string(env.knots_checked), env.first_violation ? "1" : "0"});
  }

  print_violations(out, hyp);
  if (first) {
    if (hyp.violations.empty()) {
      out << '\n';
      write_row(out, {"violation", "k", "h", "ratio"});
    }
    write_row(out, {"envelope", format_double(*first), "", ""});
  }
  return hyp.holds() && envelope_holds ? kSuccess : kViolation;
}

int cmd_counterexample(const RunConfig &config, const std::string &name, std::ostream &out) {
  const CounterexampleSection cx = config.counterexample.value_or(CounterexampleSection{});
  NamedPsi psi;
  DecayHypothesis hyp;
  std::vector<double> levels;
  if (name == "log_square") {
    psi = log_square_psi();
    hyp = DecayHypothesis{log_square_doubling_constant(), 1.0, 1.0, 1.0, 2.0 * std::numbers::ln2, 1.0};
    levels = dyadic_levels(1.0, cx.levels);
  } else if (name == "exp_power") {
    psi = exp_power_psi(cx.c_exp);
    const double k0 = k0_for_exp_power(cx.d_exp, cx.c_exp);
    hyp = DecayHypothesis{1.0, 1.0, cx.c_exp + 1.0, cx.c_exp, cx.d_exp, k0};
    levels = dyadic_levels(k0, cx.levels);
  } else {
    throw ConfigError("unknown counterexample '" + name + "' (expected log_square or exp_power)");
  }
  if (config.lemma)
    hyp = config.lemma->hyp;
  if (hyp.k0 < psi.k0)
    throw ConfigError("[lemma] k0 must be at least " + format_double(psi.k0) + " for " + name);

  write_row(out, {"name", "param", "c1", "A", "B", "C", "D", "k0"});
  write_row(out, {name, format_double(psi.param), format_double(hyp.c1), format_double(hyp.A),
                  format_double(hyp.B), format_double(hyp.C), format_double(hyp.D), format_double(hyp.k0)});

  out << '\n';
  write_row(out, {"k", "psi", "log_psi"});
  for (double k : levels)
    write_row(out, {format_double(k), format_double(psi(k)), format_double(psi.log(k))});

  out << '\n';
  const HypothesisReport doubling = check_doubling(psi, hyp, levels);
  print_hypothesis_check(out, "doubling", doubling);

  out << '\n';
  const double psi0 = std::exp(psi.log(hyp.k0));
  const auto cert = find_envelope_violation(psi, hyp, psi0, cx.k_max);
  write_row(out, {"certificate", "level", "log_psi", "psi", "envelope"});
  const std::string kind = classify(hyp).tag == DecayCase::Vanishing ? "psi_2L" : "k_star";
  if (cert)
    write_row(out, {kind, format_double(cert->level), format_double(cert->log_psi),
                    format_double(cert->psi), format_double(cert->envelope)});
  else
    write_row(out, {kind, "", "", "", ""});

  print_violations(out, doubling);
  return doubling.holds() && cert ? kSuccess : kViolation;
}

int cmd_minimize(const RunConfig &config, std::ostream &out) {
  const ExperimentConfig ec = experiment_config(config);
  const ExperimentReport report = experiment_regularity(ec);
  const GridRun &finest = report.runs.back();
  const std::string &dir = config.output.directory;

  {
    std::ofstream field = open_output(dir, "field.csv");
    write_row(field, {"radius", "u"});
    const Eigen::VectorXd &u = finest.solve.final_field.values();
    for (Eigen::Index i = 0; i < u.size(); ++i)
      write_row(field, {format_double(finest.grid.nodes[i]), format_double(u[i])});
  }
  {
    std::ofstream profile = open_output(dir, "profile.csv");
    write_row(profile, {"k", "measure"});
    for (Eigen::Index j = 0; j < finest.profile.levels.size(); ++j)
      write_row(profile, {format_double(finest.profile.levels[j]), format_double(finest.profile.measures[j])});
  }

  const std::vector<std::string> header{
      "cells",        "iterations",      "converged",  "stagnated",     "energy",
      "max_u",        "gradient_norm",   "regime",     "predicted_s",   "fitted_slope",
      "slope_r_squared", "theta",        "exp_fit_slope", "exp_fit_r_squared", "max_u_change"};
  std::ofstream file = open_output(dir, "report.csv");
  for (std::ostream *o : {static_cast<std::ostream *>(&file), &out}) {
    write_row(*o, header);
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const GridRun &run = report.runs[i];
      std::optional<double> change;
      if (i > 0 && run.max_u > 0.0)
        change = std::abs(run.max_u - report.runs[i - 1].max_u) / run.max_u;
      write_row(*o, {std::to_string(run.cells), std::to_string(run.solve.iterations),
                     yes_no(run.solve.converged), yes_no(run.solve.stagnated),
                     format_double(run.solve.energy_trace.back()), format_double(run.max_u),
                     format_double(run.solve.final_gradient_norm), std::string(to_string(report.regime)),
                     format_optional(report.predicted_s),
                     run.tail_fit ? format_double(run.tail_fit->slope) : "",
                     run.tail_fit ? format_double(run.tail_fit->r_squared) : "",
                     format_double(report.theta), run.exp_fit ? format_double(run.exp_fit->slope) : "",
                     run.exp_fit ? format_double(run.exp_fit->r_squared) : "", format_optional(change)});
    }
  }
  return report.any_converged ? kSuccess : kViolation;
}

int cmd_analyze(const RunConfig &config, const std::string &profile_path, std::ostream &out) {
  const ProblemParams &params = require(config.problem, "problem").params;
  if (profile_path.empty())
    throw ConfigError("analyze needs --profile");
  const DistributionProfile profile = read_profile(profile_path);
  const ExponentSet e = compute_exponents(params);
  const double theta = 1.0 - params.alpha * params.p / (params.p - 1.0);

  const double top = top_positive_level(profile);
  double bottom = top;
  for (Eigen::Index j = 0; j < profile.levels.size(); ++j)
    if (profile.measures[j] > 0.0 && profile.levels[j] > 0.0)
      bottom = std::min(bottom, profile.levels[j]);

  std::optional<LinearFit> tail;
  std::optional<LinearFit> expo;
  std::string tail_note;
  std::string exp_note;
  try {
    tail = tail_exponent_fit(profile, top / 10.0, top);
  } catch (const InsufficientDataError &err) {
    tail_note = err.what();
  }
  try {
    expo = exp_integrability_fit(profile, theta, bottom);
  } catch (const InsufficientDataError &err) {
    exp_note = err.what();
  }

  write_row(out, {"fit", "slope", "intercept", "r_squared", "points", "note"});
  std::vector<std::string> row{"tail"};
  for (auto &f : fit_fields(tail))
    row.push_back(f);
  row.push_back(tail_note);
  write_row(out, row);
  row = {"exp"};
  for (auto &f : fit_fields(expo))
    row.push_back(f);
  row.push_back(exp_note);
  write_row(out, row);

  out << '\n';
  write_row(out, {"quantity", "value"});
  write_row(out, {"regime", std::string(to_string(classify_regime(params)))});
  write_row(out, {"predicted_s", format_optional(e.s)});
  write_row(out, {"theta", format_double(theta)});
  if (e.s) {
    const WeakNormEstimate w = weak_norm_estimate(profile, *e.s);
    write_row(out, {"weak_norm_estimate", format_double(w.norm_estimate)});
    write_row(out, {"weak_norm_attained_at", format_double(w.attained_at)});
  }
  return kSuccess;
}

int cmd_sweep(const RunConfig &config, std::ostream &out) {
  const SweepSection &sweep = require(config.sweep, "sweep");
  ExperimentConfig base = experiment_config(config);
  std::vector<ExperimentConfig> runs;
  for (double r : sweep.r_values) {
    ExperimentConfig ec = base;
    ec.params.r = r;
    try {
      validate(ec.params);
    } catch (const DomainError &e) {
      throw ConfigError("[sweep] r_values: " + std::string(e.what()));
    }
    runs.push_back(ec);
  }

  const std::vector<std::string> header{"r",     "regime",          "predicted_s",      "cells",
                                        "max_u", "converged",       "fitted_slope",     "slope_r_squared",
                                        "exp_fit_r_squared", "stabilization_ratio"};
  std::ofstream file = open_output(config.output.directory, "sweep.csv");
  write_row(file, header);
  write_row(out, header);
  bool all_converged = true;
  for (const ExperimentConfig &ec : runs) {
    const ExperimentReport report = experiment_regularity(ec);
    all_converged = all_converged && report.any_converged;
    const GridRun &run = report.runs.back();
    const std::vector<std::string> row{
        format_double(ec.params.r), std::string(to_string(report.regime)), format_optional(report.predicted_s),
        std::to_string(run.cells), format_double(run.max_u), yes_no(run.solve.converged),
        run.tail_fit ? format_double(run.tail_fit->slope) : "",
        run.tail_fit ? format_double(run.tail_fit->r_squared) : "",
        run.exp_fit ? format_double(run.exp_fit->r_squared) : "", format_optional(report.stabilization_ratio)};
    write_row(file, row);
    write_row(out, row);
  }
  return all_converged ? kSuccess : kViolation;
}

int run(const Invocation &invocation, std::ostream &out, std::ostream &err) {
  try {
    RunConfig config = load_config(invocation.config_path);
    if (!invocation.output_dir.empty())
      config.output.directory = invocation.output_dir;
    const std::string &c = invocation.command;
    if (c == "constants")
      return cmd_constants(config, out);
    if (c == "exponents")
      return cmd_exponents(config, out);
    if (c == "verify")
      return cmd_verify(config, invocation.psi_path, out);
    if (c == "counterexample")
      return cmd_counterexample(config, invocation.name, out);
    if (c == "minimize")
      return cmd_minimize(config, out);
    if (c == "analyze")
      return cmd_analyze(config, invocation.profile_path, out);
    if (c == "sweep")
      return cmd_sweep(config, out);
    err << "error: unknown command '" << c << "'\n";
    return kInputError;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
  } catch (const CsvError &e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::domain_error &e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << '\n';
  } catch (const WrongCaseError &e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
  } catch (const NonFiniteEnergyError &e) {
    err << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kInputError;
}

} // namespace levelset::cli
