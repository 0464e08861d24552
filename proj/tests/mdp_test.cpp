#include "gbsirl/mdp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gbsirl;

namespace {

// x0 --a0--> x1, x1 absorbing under both actions; a1 self-loops at x0.
// r(x1) = 1, r(x0) = 0, discount 0.9. Solving the 2x2 linear system by hand:
// Q(x1,.) = 1/(1-0.9) = 10, Q(x0,a0) = 0 + 0.9*10 = 9, Q(x0,a1) = 0.9*Q*(x0).
Mdp two_state_chain() {
  std::vector<std::vector<std::pair<int, double>>> rows(4);
  rows[0 * 2 + 0] = {{1, 1.0}};  // a0 from x0 -> x1
  rows[0 * 2 + 1] = {{1, 1.0}};  // a0 from x1 -> x1
  rows[1 * 2 + 0] = {{0, 1.0}};  // a1 from x0 -> x0
  rows[1 * 2 + 1] = {{1, 1.0}};  // a1 from x1 -> x1
  return Mdp::from_rows(2, 2, rows, 0.9);
}

RewardFunction chain_reward() { return RewardFunction::state_based({0.0, 1.0}, 2); }

Mdp random_mdp_for_test(int S, int A, std::uint64_t seed, double discount) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(S) * A);
  for (auto& row : rows) {
    std::vector<double> w(S);
    double sum = 0.0;
    for (auto& v : w) {
      v = exp1(rng);
      sum += v;
    }
    for (int y = 0; y < S; ++y) row.push_back({y, w[y] / sum});
  }
  return Mdp::from_rows(S, A, rows, discount);
}

TEST(SolveQ, SingleStateGeometricSeries) {
  Mdp m = Mdp::from_rows(1, 1, {{{0, 1.0}}}, 0.5);
  RewardFunction r = RewardFunction::state_based({1.0}, 1);
  QFunction q = solve_q(m, r, 1e-10);
  EXPECT_NEAR(q.at(0, 0), 2.0, 1e-9);
  EXPECT_LE(q.converged_residual, 1e-10);
}

TEST(SolveQ, ZeroDiscountCollapsesToReward) {
  Mdp m = random_mdp_for_test(6, 3, 7, 0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(6 * 3);
  for (auto& v : vals) v = u(rng);
  RewardFunction r(6, 3, vals);
  QFunction q = solve_q(m, r, 1e-12);
  for (int x = 0; x < 6; ++x)
    for (int a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(q.at(x, a), r.at(x, a));
}

TEST(SolveQ, TwoStateChainHandSolved) {
  QFunction q = solve_q(two_state_chain(), chain_reward(), 1e-9);
  EXPECT_NEAR(q.at(0, 0), 9.0, 1e-7);
  EXPECT_NEAR(q.at(1, 0), 10.0, 1e-7);
  EXPECT_NEAR(q.at(1, 1), 10.0, 1e-7);
}

TEST(SolveQ, RejectsBadArguments) {
  Mdp m = two_state_chain();
  EXPECT_THROW(solve_q(m, chain_reward(), 0.0), std::invalid_argument);
  EXPECT_THROW(solve_q(m, RewardFunction::state_based({1.0}, 2), 1e-8),
               std::invalid_argument);
}

TEST(Mdp, RejectsNonStochasticRows) {
  std::vector<std::vector<std::pair<int, double>>> rows(2);
  rows[0] = {{0, 0.5}, {1, 0.4}};  // sums to 0.9
  rows[1] = {{1, 1.0}};
  EXPECT_THROW(Mdp::from_rows(2, 1, rows, 0.9), model_error);
}

TEST(Mdp, SparseStorageAutoSelected) {
  // Deterministic rows on 8 states: density 1/8 < 25%.
  std::vector<std::vector<std::pair<int, double>>> rows(8);
  for (int x = 0; x < 8; ++x) rows[x] = {{(x + 1) % 8, 1.0}};
  Mdp m = Mdp::from_rows(8, 1, rows, 0.9);
  EXPECT_TRUE(m.sparse());
  EXPECT_DOUBLE_EQ(m.prob(0, 3, 4), 1.0);
  EXPECT_DOUBLE_EQ(m.prob(0, 3, 5), 0.0);

  Mdp d = random_mdp_for_test(4, 2, 3, 0.9);
  EXPECT_FALSE(d.sparse());
}

TEST(GreedyActionSet, TieHandling) {
  QFunction q{1, 3, {1.0, 1.0, 0.0}, 0.0};
  EXPECT_EQ(greedy_action_set(q, 0, 1e-9), (std::vector<int>{0, 1}));

  QFunction q2{1, 3, {0.0, 0.5, 1.0}, 0.0};
  EXPECT_EQ(greedy_action_set(q2, 0, 1e-9), (std::vector<int>{2}));

  QFunction q3{1, 3, {1.0, 1.0 - 1e-12, 0.0}, 0.0};
  EXPECT_EQ(greedy_action_set(q3, 0, 1e-9), (std::vector<int>{0, 1}));
}

TEST(EvaluatePolicy, ZeroDiscountAndScalarFixedPoint) {
  // 1 state, uniform policy over 2 actions, r = (0, 2), discount 0.5:
  // V = 1 / (1 - 0.5) = 2.
  Mdp m = Mdp::from_rows(1, 2, {{{0, 1.0}}, {{0, 1.0}}}, 0.5);
  RewardFunction r(1, 2, {0.0, 2.0});
  Policy pi{1, 2, {0.5, 0.5}};
  auto v = evaluate_policy(m, r, pi, 1e-10);
  EXPECT_NEAR(v[0], 2.0, 1e-9);

  Mdp m0 = Mdp::from_rows(1, 2, {{{0, 1.0}}, {{0, 1.0}}}, 0.0);
  auto v0 = evaluate_policy(m0, r, pi, 1e-10);
  EXPECT_DOUBLE_EQ(v0[0], 1.0);
}

TEST(EvaluatePolicy, OptimalPolicyOnChain) {
  Mdp m = two_state_chain();
  Policy pi{2, 2, {1.0, 0.0, 1.0, 0.0}};  // always a0
  auto v = evaluate_policy(m, chain_reward(), pi, 1e-9);
  EXPECT_NEAR(v[0], 9.0, 1e-7);
  EXPECT_NEAR(v[1], 10.0, 1e-7);
}

TEST(ValueLoss, SelfComparisonIsZero) {
  Mdp m = two_state_chain();
  QFunction q = solve_q(m, chain_reward(), 1e-9);
  std::vector<std::uint64_t> masks(2);
  for (int x = 0; x < 2; ++x) masks[x] = greedy_mask(q, x);
  Policy pi = Policy::uniform_over(2, 2, masks);
  EXPECT_NEAR(value_loss(m, chain_reward(), pi), 0.0, 2e-8);
}

TEST(ValueLoss, StayingPolicyOnChain) {
  // Staying in x0 forever loses all of V*(x0) = 9; x1 is already absorbing,
  // so the mean loss over the two states is 9/2.
  Mdp m = two_state_chain();
  Policy stay{2, 2, {0.0, 1.0, 1.0, 0.0}};
  EXPECT_NEAR(value_loss(m, chain_reward(), stay), 4.5, 1e-6);
}

TEST(ValueLoss, ZeroDiscountGreedyReward) {
  Mdp m = random_mdp_for_test(5, 3, 21, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(5 * 3);
  for (auto& v : vals) v = u(rng);
  RewardFunction r(5, 3, vals);
  QFunction q = solve_q(m, r, 1e-10);
  std::vector<std::uint64_t> masks(5);
  for (int x = 0; x < 5; ++x) masks[x] = greedy_mask(q, x);
  EXPECT_NEAR(value_loss(m, r, Policy::uniform_over(5, 3, masks)), 0.0, 1e-9);
}

// Adding a constant c to every reward entry shifts every Q value by exactly
// c/(1-discount) and leaves greedy sets unchanged.
TEST(SolveQ, ConstantShiftProperty) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Mdp m = random_mdp_for_test(8, 4, 1000 + rep, 0.9);
    std::vector<double> vals(8 * 4);
    for (auto& v : vals) v = u(rng);
    RewardFunction r(8, 4, vals);
    double c = 0.75;
    std::vector<double> shifted = vals;
    for (auto& v : shifted) v += c;
    RewardFunction rs(8, 4, shifted);

    QFunction q = solve_q(m, r);
    QFunction qs = solve_q(m, rs);
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(greedy_mask(q, x), greedy_mask(qs, x));
      for (int a = 0; a < 4; ++a)
        EXPECT_NEAR(qs.at(x, a) - q.at(x, a), c / (1.0 - 0.9), 5e-7);
    }
  }
}

TEST(SolveQ, GreedyPolicyValueMatchesMaxQ) {
  Mdp m = random_mdp_for_test(10, 4, 42, 0.85);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(10 * 4);
  for (auto& v : vals) v = u(rng);
  RewardFunction r(10, 4, vals);

  QFunction q = solve_q(m, r);
  std::vector<std::uint64_t> masks(10);
  for (int x = 0; x < 10; ++x) masks[x] = greedy_mask(q, x);
  auto v = evaluate_policy(m, r, Policy::uniform_over(10, 4, masks));
  for (int x = 0; x < 10; ++x) {
    double best = q.at(x, 0);
    for (int a = 1; a < 4; ++a) best = std::max(best, q.at(x, a));
    EXPECT_NEAR(v[x], best, 1e-6);
  }
}

TEST(SolveQ, Deterministic) {
  Mdp m = random_mdp_for_test(12, 5, 8, 0.95);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(12 * 5);
  for (auto& v : vals) v = u(rng);
  RewardFunction r(12, 5, vals);
  QFunction a = solve_q(m, r);
  QFunction b = solve_q(m, r);
  EXPECT_EQ(a.q, b.q);
}

}  // namespace
