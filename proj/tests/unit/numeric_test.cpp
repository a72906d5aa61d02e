#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cimset/fixtures.hpp"
#include "cimset/numeric.hpp"
#include "oracles.hpp"

using namespace cimset;

namespace {

NodeSet s(std::initializer_list<NodeId> ids) { return NodeSet::of(ids); }

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Givens, TwoNodeExample) {
  Eigen::MatrixXd e(2, 2);
  e << 1, 1, 0, 1;
  const FactorMatrix q{e, {Family{{}, 1}, Family{s({1}), 2}}};
  const auto out = givens_flip_factor(q, CoveredFlipMove{{}, 1, 2});
  Eigen::MatrixXd expect(2, 2);
  expect << std::sqrt(2.0), 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_LT(max_abs(out.entries - expect), 1e-12);
  EXPECT_EQ(out.labels[0], (Family{s({2}), 1}));
  EXPECT_EQ(out.labels[1], (Family{{}, 2}));
  Eigen::MatrixXd prec(2, 2);
  prec << 2, 1, 1, 1;
  EXPECT_LT(max_abs(precision_from_factor(q) - prec), 1e-12);
  EXPECT_LT(max_abs(precision_from_factor(out) - prec), 1e-12);
  EXPECT_EQ(out.support_violation(), 0.0);
}

TEST(Givens, Errors) {
  const FactorMatrix id{Eigen::MatrixXd::Identity(2, 2), {Family{{}, 1}, Family{{}, 2}}};
  EXPECT_THROW(givens_flip_factor(id, CoveredFlipMove{{}, 1, 2}), InvalidArgument);

  Eigen::MatrixXd e(2, 2);
  e << 0, 1, 1, 1;
  const FactorMatrix zero_pivot{e, {Family{{}, 1}, Family{s({1}), 2}}};
  EXPECT_THROW(givens_flip_factor(zero_pivot, CoveredFlipMove{{}, 1, 2}), InvalidArgument);
}

TEST(Givens, RandomCoveredFlipsKeepPrecisionAndSupport) {
  std::mt19937_64 rng(11);
  int flips = 0;
  while (flips < 1000) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto g = oracle::to_graph(oracle::random_dag(n, rng, 0.5));
    const auto covered = covered_edges(g);
    if (covered.empty()) continue;
    auto it = covered.begin();
    std::advance(it, static_cast<long>(rng() % covered.size()));
    const auto [i, j] = *it;
    const FactorMatrix q = random_factor(g, rng());
    const auto out = givens_flip_factor(q, CoveredFlipMove{g.parents(i), i, j});
    const double scale = max_abs(precision_from_factor(q));
    EXPECT_LT(max_abs(precision_from_factor(out) - precision_from_factor(q)), 1e-12 * scale);
    EXPECT_EQ(out.support_violation(), 0.0);
    ASSERT_TRUE(out.as_graph().has_value());
    EXPECT_EQ(*out.as_graph(), apply_covered_flip(g, *it));
    ++flips;
  }
}

TEST(Relabel, ColumnWithFullSupport) {
  const auto g = DirectedGraph::from_edges(3, {{1, 3}, {2, 3}});
  const auto q = random_factor(g, 3);
  const auto out = relabel_column(q, Family{s({1, 2}), 3}, Family{s({1, 3}), 2});
  EXPECT_EQ(out.entries, q.entries);
  EXPECT_EQ(out.labels[2], (Family{s({1, 3}), 2}));
  EXPECT_EQ(relabel_column(out, Family{s({1, 3}), 2}, Family{s({1, 2}), 3}).labels, q.labels);
  EXPECT_FALSE(out.as_graph().has_value());
  EXPECT_THROW(relabel_column(q, Family{s({1, 2}), 3}, Family{s({1}), 2}), InvalidArgument);
  EXPECT_THROW(relabel_column(q, Family{s({2}), 3}, Family{s({3}), 2}), InvalidArgument);
}

TEST(Relabel, CycleReversalKeepsEntries) {
  const auto g = fixtures::three_cycle();
  const auto q = random_factor(g, 8);
  const auto out = reverse_cycle_factor(q, Cycle{{1, 2, 3}});
  EXPECT_EQ(out.entries, q.entries);
  ASSERT_TRUE(out.as_graph().has_value());
  EXPECT_EQ(*out.as_graph(), fixtures::three_cycle_reversed());
  EXPECT_EQ(out.support_violation(), 0.0);
  const auto ordered = out.in_child_order();
  for (int j = 0; j < 3; ++j) EXPECT_EQ(ordered.labels[static_cast<std::size_t>(j)].child, j + 1);
  EXPECT_LT(max_abs(precision_from_factor(ordered) - precision_from_factor(q)), 1e-12);
}

TEST(RandomFactor, DeterministicAndSupported) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::to_graph(oracle::random_graph(5, rng, 0.4));
    const auto a = random_factor(g, 77);
    EXPECT_EQ(a.entries, random_factor(g, 77).entries);
    EXPECT_EQ(a.labels, families(g));
    EXPECT_EQ(a.support_violation(), 0.0);
    for (int j = 1; j <= 5; ++j) EXPECT_GE(std::abs(a.entries(j - 1, j - 1)), 0.1);
    for (int i = 1; i <= 5; ++i)
      for (int j = 1; j <= 5; ++j)
        if (g.has_edge(i, j)) EXPECT_NE(a.entries(i - 1, j - 1), 0.0);
  }
}

TEST(Precision, SemAndFactorRoutesAgree) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::to_graph(oracle::random_dag(5, rng, 0.5));
    const auto p = random_sem(g, rng());
    const Eigen::MatrixXd k = precision_from_sem(p);
    EXPECT_LT(max_abs(k - precision_from_factor(factor_from_sem(g, p))), 1e-10 * std::max(1.0, max_abs(k)));
    EXPECT_LT(max_abs(k - k.transpose()), 1e-12 * max_abs(k));
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Precision, SingularSemRejected) {
  SemParams p{Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(2)};
  p.lambda(0, 1) = 1.0;
  p.lambda(1, 0) = 1.0;
  EXPECT_THROW(precision_from_sem(p), InvalidArgument);
  p.lambda.setZero();
  p.omega(1) = 0.0;
  EXPECT_THROW(precision_from_sem(p), InvalidArgument);
  EXPECT_THROW(precision_from_factor(FactorMatrix{Eigen::MatrixXd::Zero(2, 2), {}}), InvalidArgument);
}

TEST(Solver, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  const auto g = fixtures::cyclic_pair_left();
  const auto h = fixtures::cyclic_pair_right();
  const auto q = random_factor(g, 4);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> a(6);
    for (auto& x : a) x = angle(rng);
    const std::vector<int> sg{1, -1, 1, 1};
    const auto ev = feasibility_objective(q.entries, h, a, sg);
    for (std::size_t k = 0; k < a.size(); ++k) {
      auto up = a, dn = a;
      up[k] += 1e-6;
      dn[k] -= 1e-6;
      const double fd =
          (feasibility_objective(q.entries, h, up, sg).value - feasibility_objective(q.entries, h, dn, sg).value) / 2e-6;
      EXPECT_NEAR(ev.gradient(static_cast<Eigen::Index>(k)), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  EXPECT_THROW(feasibility_objective(q.entries, h, {0.0}, {1, 1, 1, 1}), InvalidArgument);
}

TEST(Solver, GivensProductIsOrthogonal) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(-3.2, 3.2);
  for (int n = 2; n <= 6; ++n) {
    std::vector<double> a(static_cast<std::size_t>(n * (n - 1) / 2));
    for (auto& x : a) x = angle(rng);
    std::vector<int> sg(static_cast<std::size_t>(n), 1);
    sg[0] = -1;
    const auto u = givens_product(n, a, sg);
    EXPECT_LT(max_abs(u.transpose() * u - Eigen::MatrixXd::Identity(n, n)), 1e-10);
  }
  EXPECT_THROW(givens_product(3, {0.0}, {1, 1, 1}), InvalidArgument);
}

TEST(Solver, OwnLabelsAreFeasibleAtIdentity) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto g = oracle::to_graph(oracle::random_graph(5, rng, 0.4));
    OrthSolverConfig cfg;
    cfg.restarts = 3;
    const auto sol = orth_feasibility(random_factor(g, rng()), g, cfg);
    EXPECT_EQ(sol.residual, 0.0);
    EXPECT_EQ(sol.best_restart, 0);
    EXPECT_EQ(sol.restarts_run, 1);
  }
}

TEST(Solver, TracesDecreaseAndSolutionIsOrthogonal) {
  OrthSolverConfig cfg;
  cfg.restarts = 6;
  cfg.record_trace = true;
  cfg.stop_when_feasible = false;
  cfg.seed = 5;
  const auto chain = DirectedGraph::from_edges(3, {{1, 2}, {2, 3}});
  const auto collider = DirectedGraph::from_edges(3, {{1, 2}, {3, 2}});
  const auto sol = orth_feasibility(random_factor(chain, 1), collider, cfg);
  ASSERT_EQ(sol.traces.size(), 6u);
  for (const auto& tr : sol.traces)
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr[k], tr[k - 1]);
  EXPECT_LT(max_abs(sol.u.transpose() * sol.u - Eigen::MatrixXd::Identity(3, 3)), 1e-10);
  EXPECT_EQ(sol.restarts_run, 6);
}

TEST(Solver, ConfigValidation) {
  OrthSolverConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(validate_config(cfg), InvalidArgument);
  cfg = {};
  cfg.tau = 0.0;
  EXPECT_THROW(validate_config(cfg), InvalidArgument);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(validate_config(cfg), InvalidArgument);
  EXPECT_THROW(covariance_equiv_numeric(DirectedGraph(2), DirectedGraph(3), OrthSolverConfig{}, 1), InvalidArgument);
  EXPECT_THROW(covariance_equiv_numeric(DirectedGraph(2), DirectedGraph(2), OrthSolverConfig{}, 0), InvalidArgument);
}

TEST(Verdict, TwoCycleExampleIsFeasibleBothWays) {
  OrthSolverConfig cfg;
  cfg.seed = 3;
  const auto v = covariance_equiv_numeric(fixtures::two_cycle_example_g(), fixtures::two_cycle_example_h(), cfg, 3);
  EXPECT_EQ(v.verdict, Verdict::EvidenceEquivalent);
  for (double r : v.g_to_h) EXPECT_LT(r, 1e-8);
  for (double r : v.h_to_g) EXPECT_LT(r, 1e-8);
}

TEST(Verdict, ChainAndForkAgree) {
  OrthSolverConfig cfg;
  const auto chain = DirectedGraph::from_edges(3, {{1, 2}, {2, 3}});
  const auto fork = DirectedGraph::from_edges(3, {{2, 1}, {2, 3}});
  const auto v = covariance_equiv_numeric(chain, fork, cfg, 5);
  EXPECT_EQ(v.verdict, Verdict::EvidenceEquivalent);
  EXPECT_EQ(v.g_to_h.size(), 5u);
  EXPECT_EQ(v.trials, 5);
}

TEST(Verdict, ChainAndColliderDisagree) {
  OrthSolverConfig cfg;
  const auto chain = DirectedGraph::from_edges(3, {{1, 2}, {2, 3}});
  const auto collider = DirectedGraph::from_edges(3, {{1, 2}, {3, 2}});
  const auto v = covariance_equiv_numeric(chain, collider, cfg, 3, 2);
  EXPECT_EQ(v.verdict, Verdict::EvidenceInequivalent);
  for (double r : v.g_to_h) EXPECT_GT(r, 1e-3);
  for (double r : v.h_to_g) EXPECT_GT(r, 1e-3);
  // Parallel trials give the same residuals as serial ones.
  const auto serial = covariance_equiv_numeric(chain, collider, cfg, 3, 1);
  EXPECT_EQ(serial.g_to_h, v.g_to_h);
  EXPECT_EQ(serial.h_to_g, v.h_to_g);
}
