#include "levelset/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char **argv) {
  using levelset::cli::Invocation;

  CLI::App app{"Level-set decay lemma engine and regularity experiments"};
  app.require_subcommand(1);
  Invocation inv;

  auto add = [&](const char *name, const char *help) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", inv.config_path, "configuration file")->required();
    return sub;
  };
  add("constants", "classify the hypothesis and print the envelope constants");
  add("exponents", "print the exponent table for the problem section");
  add("verify", "check a tabulated psi against the hypothesis and its envelope")
      ->add_option("--psi", inv.psi_path, "CSV with header k,psi or k,measure")
      ->required();
  add("counterexample", "tabulate a counterexample and certify the envelope failure")
      ->add_option("--name", inv.name, "log_square or exp_power")
      ->required();
  CLI::App *minimize = add("minimize", "minimize the discrete functional on each grid");
  minimize->add_option("-o,--output", inv.output_dir, "output directory (overrides [output])");
  add("analyze", "fit an existing profile.csv")
      ->add_option("--profile", inv.profile_path, "profile CSV with header k,measure")
      ->required();
  CLI::App *sweep = add("sweep", "run the experiment for each r in [sweep] r_values");
  sweep->add_option("-o,--output", inv.output_dir, "output directory (overrides [output])");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : levelset::cli::kInputError;
  }
  inv.command = app.get_subcommands().front()->get_name();
  return levelset::cli::run(inv, std::cout, std::cerr);
}
