#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cauchyreg/experiments.hpp"

using namespace cauchyreg;

namespace {

ExperimentGrid small_continuous_grid() {
  ExperimentGrid g;
  g.dgp = DgpKind::continuous;
  g.beta_values = {0.0, 0.02};
  g.kappa_values = {0.0, 5.0};
  g.T_values = {2.0};
  g.vol_models = {VolModel::CNST, VolModel::RS};
  g.methods = {MethodSpec::parse("tau"), MethodSpec::parse("t8"), MethodSpec::parse("tau_raw")};
  g.n_reps = 120;
  return g;
}

ExperimentGrid small_discrete_grid() {
  ExperimentGrid g;
  g.dgp = DgpKind::discrete;
  g.beta_values = {0.0, 0.5};
  g.kappa_values = {0.0, 50.0};
  g.T_values = {240.0};
  g.vol_models = {VolModel::CNST, VolModel::SB};
  g.methods = {MethodSpec::parse("tau_o"), MethodSpec::parse("t8_tau_o"), MethodSpec::parse("tau_e")};
  g.sided = Sided::right;
  g.n_reps = 120;
  return g;
}

}  // namespace

TEST(MethodSpec, LabelRoundTrip) {
  for (const char* label : {"tau", "tau_raw", "tau_e", "tau_o", "t2", "t8", "t12", "t16_tau_e", "t8_tau_o"}) {
    EXPECT_EQ(MethodSpec::parse(label).label(), label);
  }
  EXPECT_EQ(MethodSpec::parse("t12").q, 12u);
  EXPECT_TRUE(MethodSpec::parse("t8_tau_e").needs_levels());
  EXPECT_FALSE(MethodSpec::parse("t8").needs_levels());
  for (const char* bad : {"", "t", "t1", "tx", "tau_x", "t8_tau", "hybrid", "t8_tau_oo"}) {
    EXPECT_THROW(MethodSpec::parse(bad), std::invalid_argument) << bad;
  }
}

TEST(ExperimentGrid, CellOrderAndCount) {
  const auto g = small_continuous_grid();
  const auto cells = g.cells();
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0], (CellKey{0.0, 0.0, 2.0, VolModel::CNST}));
  EXPECT_EQ(cells[1], (CellKey{0.02, 0.0, 2.0, VolModel::CNST}));
  EXPECT_EQ(cells[2], (CellKey{0.0, 5.0, 2.0, VolModel::CNST}));
  EXPECT_EQ(cells[4].vol, VolModel::RS);
}

TEST(ExperimentGrid, Validation) {
  auto g = small_continuous_grid();
  g.methods.clear();
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_continuous_grid();
  g.alpha = 1.5;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_continuous_grid();
  g.methods = {MethodSpec::parse("tau_e")};
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_discrete_grid();
  g.vol_models = {VolModel::GBM};
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_discrete_grid();
  g.T_values = {20.0};
  g.methods = {MethodSpec::parse("t12_tau_o")};
  EXPECT_THROW(g.validate(), PartitionError);
  g.methods = {MethodSpec::parse("t8_tau_o")};
  EXPECT_NO_THROW(g.validate());
  g = small_continuous_grid();
  g.T_values = {10.0 / 252.0};
  g.methods = {MethodSpec::parse("t12")};
  EXPECT_THROW(g.validate(), PartitionError);
  g = small_continuous_grid();
  g.n_reps = 0;
  EXPECT_THROW(run_grid(g), std::invalid_argument);
}

TEST(RunGrid, WorkerCountDoesNotChangeResults) {
  for (const auto& g : {small_continuous_grid(), small_discrete_grid()}) {
    const McTable a = run_grid(g, 1);
    const McTable b = run_grid(g, 8);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      EXPECT_EQ(a.cells[i].rejections, b.cells[i].rejections);
      EXPECT_EQ(a.cells[i].degenerate, b.cells[i].degenerate);
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a.cells[i].freq), std::bit_cast<std::uint64_t>(b.cells[i].freq));
    }
  }
}

TEST(RunGrid, CountersAreConserved) {
  const auto g = small_discrete_grid();
  const McTable t = run_grid(g, 2);
  ASSERT_EQ(t.cells.size(), g.cells().size() * g.methods.size());
  for (const auto& c : t.cells) {
    EXPECT_EQ(c.n_reps, g.n_reps);
    EXPECT_LE(c.rejections + c.degenerate, c.n_reps);
    EXPECT_DOUBLE_EQ(c.freq, static_cast<double>(c.rejections) / static_cast<double>(c.n_reps));
    EXPECT_DOUBLE_EQ(c.mc_se, std::sqrt(c.freq * (1.0 - c.freq) / static_cast<double>(c.n_reps)));
  }
}

TEST(RunGrid, SingleReplicationGivesZeroOrOne) {
  auto g = small_continuous_grid();
  g.n_reps = 1;
  for (const auto& c : run_grid(g).cells) EXPECT_TRUE(c.freq == 0.0 || c.freq == 1.0);
}

TEST(RunGrid, AddingGridPointsLeavesExistingCellsUnchanged) {
  auto g = small_continuous_grid();
  const McTable before = run_grid(g);
  g.beta_values.push_back(0.05);
  g.kappa_values.insert(g.kappa_values.begin(), 20.0);
  g.methods.insert(g.methods.begin(), MethodSpec::parse("t12"));
  const McTable after = run_grid(g);
  for (const auto& c : before.cells) {
    EXPECT_EQ(after.at(c.key, c.method).rejections, c.rejections) << c.method;
  }
}

TEST(RunGrid, SeedChangesResults) {
  auto g = small_continuous_grid();
  g.n_reps = 300;
  const McTable a = run_grid(g);
  g.master_seed += 1;
  const McTable b = run_grid(g);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) differ += a.cells[i].rejections != b.cells[i].rejections;
  EXPECT_GT(differ, 0u);
}

TEST(RunGrid, CommonRandomNumbersAcrossMethods) {
  // every method in a cell sees the same replications
  auto g = small_continuous_grid();
  const CellKey cell{0.02, 0.0, 2.0, VolModel::CNST};
  const auto tau = collect_statistics(g, cell, MethodSpec::parse("tau"));
  for (std::size_t r = 0; r < 10; ++r) {
    const auto s = simulate_sample(g, cell, r);
    EXPECT_EQ(tau[r], hybrid_statistic(s));
  }
}

TEST(McStandardError, Formula) {
  EXPECT_DOUBLE_EQ(mc_standard_error(0.05, 2000), std::sqrt(0.05 * 0.95 / 2000.0));
  EXPECT_EQ(mc_standard_error(0.0, 10), 0.0);
}

TEST(MonteCarlo, ContinuousConstantVolatilitySize) {
  ExperimentGrid g;
  g.methods = {MethodSpec::parse("tau")};
  g.T_values = {20.0};
  g.kappa_values = {5.0};
  g.n_reps = 2000;
  const auto c = run_grid(g).cells.front();
  EXPECT_GE(c.freq, 0.035);
  EXPECT_LE(c.freq, 0.065);
}

TEST(MonteCarlo, PowerRisesWithSlope) {
  ExperimentGrid g;
  g.methods = {MethodSpec::parse("tau")};
  g.T_values = {20.0};
  g.beta_values = {0.0, 0.01, 0.03};
  g.n_reps = 600;
  const McTable t = run_grid(g);
  EXPECT_LT(t.cells[0].freq, t.cells[1].freq);
  EXPECT_LT(t.cells[1].freq, t.cells[2].freq);
}

TEST(MonteCarlo, RunCellMatchesGridEntry) {
  const auto g = small_discrete_grid();
  const CellKey cell{0.5, 50.0, 240.0, VolModel::SB};
  const auto one = run_cell(g, cell, MethodSpec::parse("t8_tau_o"), 3);
  EXPECT_EQ(one.rejections, run_grid(g).at(cell, "t8_tau_o").rejections);
}

TEST(D2Study, ThresholdOneGivesUnitTail) {
  const auto s = d2_study(200, 200, 1.0, 3, 2);
  EXPECT_EQ(s.tail_prob, 1.0);
  EXPECT_GT(s.min_value, 1.0);
  EXPECT_EQ(s.histogram.below, 0u);
}

TEST(D2Study, TinyRunAndDeterminism) {
  const auto a = d2_study(10, 100, 4.303, 9, 1);
  const auto b = d2_study(10, 100, 4.303, 9, 4);
  EXPECT_EQ(a.n_draws, 10u);
  EXPECT_EQ(a.tail_prob, b.tail_prob);
  EXPECT_EQ(a.min_value, b.min_value);
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  std::size_t total = a.histogram.below + a.histogram.above;
  for (auto c : a.histogram.counts) total += c;
  EXPECT_EQ(total, 10u);
  EXPECT_THROW(d2_study(0, 100, 4.3), std::invalid_argument);
  EXPECT_THROW(d2_study(10, 50, 4.3), std::invalid_argument);
}

TEST(Histogram, Binning) {
  Histogram h;
  h.counts.assign(5, 0);
  h.add(0.5);
  h.add(1.0);
  h.add(1.19);
  h.add(1.25);
  h.add(1.99);
  h.add(2.0);
  EXPECT_EQ(h.below, 1u);
  EXPECT_EQ(h.above, 1u);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1, 0, 0, 1}));
  EXPECT_DOUBLE_EQ(h.bin_center(0), 1.1);
}
