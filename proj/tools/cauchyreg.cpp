#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cauchyreg/cli/commands.hpp"

using namespace cauchyreg;

int main(int argc, char** argv) {
  CLI::App app{"Cauchy-based predictability tests and Monte Carlo studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  const std::map<std::string, Sided> sides{{"two", Sided::two_sided}, {"right", Sided::right}, {"left", Sided::left}};
  const std::map<std::string, Parity> parities{{"even", Parity::even}, {"odd", Parity::odd}};

  cli::TestOptions test;
  auto* t = app.add_subcommand("test", "Test H0: beta = 0 on an aligned CSV series");
  t->add_option("data", test.data_path, "CSV file with date, return and predictor columns")->required()->check(CLI::ExistingFile);
  t->add_option("--method", test.method, "hybrid, tq or hybrid_raw")->check(CLI::IsMember({"hybrid", "tq", "hybrid_raw"}));
  t->add_option("--q", test.q, "Number of groups for tq")->check(CLI::Range(2, 100000));
  t->add_option("--parity", test.parity, "Observation subset for --intercept")->transform(CLI::CheckedTransformer(parities));
  t->add_option("--sided", test.sided, "Alternative: two, right (beta > 0) or left")->transform(CLI::CheckedTransformer(sides));
  t->add_option("--alpha", test.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  t->add_flag("--intercept", test.intercept, "Use the intercept-robust differenced variants");
  t->add_option("--date-col", test.schema.date_col, "Date column name");
  t->add_option("--y-col", test.schema.y_col, "Return column name");
  t->add_option("--x-col", test.schema.x_col, "Predictor column name");
  t->add_option("--min-rows", test.schema.min_rows, "Minimum number of rows");
  t->add_option("--out", test.out_dir, "Directory for test_result.csv");

  cli::TableOptions table;
  std::uint64_t table_seed = 0;
  auto* tb = app.add_subcommand("table", "Run a Monte Carlo size/power table from a config or manifest");
  tb->add_option("--config", table.config_path, "Experiment JSON (or a run manifest)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = tb->add_option("--seed", table_seed, "Override the master seed");
  tb->add_option("--workers", table.workers, "Worker threads")->check(CLI::Range(1, 1024));
  tb->add_option("--out", table.out_dir, "Output directory");

  cli::D2Options d2;
  auto* d = app.add_subcommand("d2", "Simulate the D_2 limit law");
  d->add_option("--draws", d2.n_draws, "Number of draws");
  d->add_option("--steps", d2.n_steps, "Grid points per Brownian path");
  d->add_option("--threshold", d2.threshold, "Tail threshold");
  d->add_option("--seed", d2.seed, "Master seed");
  d->add_option("--workers", d2.workers, "Worker threads")->check(CLI::Range(1, 1024));
  d->add_option("--out", d2.out_dir, "Directory for d2_histogram.csv");

  cli::SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Dump one simulated path as CSV");
  s->add_option("--config", sim.config_path, "Experiment JSON; its first cell is simulated")->check(CLI::ExistingFile);
  s->add_option("--dgp", sim.dgp, "continuous or discrete")->check(CLI::IsMember({"continuous", "discrete"}));
  s->add_option("--beta", sim.beta, "Slope");
  s->add_option("--kappa", sim.kappa, "Persistence parameter kappa_bar");
  s->add_option("--T", sim.T, "Years (continuous) or observations (discrete)");
  s->add_option("--vol", sim.vol, "CNST, SB, RS or GBM")->check(CLI::IsMember({"CNST", "SB", "RS", "GBM"}));
  s->add_option("--seed", sim.seed, "Master seed");
  s->add_option("--rep", sim.replication, "Replication index");
  s->add_option("--out", sim.out_dir, "Directory for simulated_path.csv (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) table.seed = table_seed;
  return cli::run_guarded(
      [&] {
        if (*t) return cli::cmd_test(test, std::cout);
        if (*tb) return cli::cmd_table(table, std::cout);
        if (*d) return cli::cmd_d2(d2, std::cout);
        return cli::cmd_simulate(sim, std::cout);
      },
      std::cerr);
}
