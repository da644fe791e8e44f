// kothe: experiment runner. Each subcommand reads a JSON config, runs the
// task and writes a JSON report and a CSV summary into --out.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kothe/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weights, factorizations and norm constants on finite measure spaces"};
  app.require_subcommand(1);

  std::string config;
  kothe::RunOptions opt;
  std::uint64_t seed = 0;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "directory for the report and the summary")->capture_default_str();
    sub->add_option("--seed", seed, "seed, overrides the config");
    sub->add_flag("--quiet", opt.quiet, "print nothing on success");
    return sub;
  };
  add("run", "run the task named in the config");
  add("norm", "norm table over the power identities");
  add("constants", "convexity and concavity constant estimates");
  add("weight", "weight pair or domain weight for an operator");
  add("pietsch", "Pietsch measure for an operator on l_inf^N");
  add("minimax", "positive functionals for a homogeneous bilinear form");
  add("vv-weight", "weights for a block operator between vector-valued spaces");
  add("verify", "re-check a weight certificate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() != "run") opt.task = sub->get_name();
  if (sub->count("--seed") > 0) opt.seed = seed;

  const kothe::RunOutcome out = kothe::run_experiment(config, opt);
  if (out.exit_code == 2) {
    std::cerr << "error: " << out.message << "\n";
    return 2;
  }
  if (!opt.quiet || out.exit_code != 0) {
    for (const auto& r : out.rows)
      std::printf("%-22s %-24s value=%-14.9g residual=%-10.3g %s\n", r.task.c_str(), r.space.c_str(), r.value,
                  r.residual, r.status.c_str());
    std::printf("report: %s\nsummary: %s\n%s\n", out.report_path.string().c_str(), out.summary_path.string().c_str(),
                out.exit_code == 0 ? "all checks passed" : "some checks FAILED");
  }
  return out.exit_code;
}
