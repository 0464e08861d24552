#include "gbsirl/hypothesis.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gbsirl;

namespace {

Mdp random_mdp_for_test(int S, int A, std::uint64_t seed, double discount = 0.9) {
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

RewardFunction random_state_reward(int S, int A, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(S);
  for (auto& v : vals) v = u(rng);
  return RewardFunction::state_based(std::move(vals), A);
}

TEST(BuildSpace, ConstantShiftDedups) {
  Mdp m = random_mdp_for_test(6, 3, 1);
  std::mt19937_64 rng(2);
  RewardFunction r = random_state_reward(6, 3, rng);
  std::vector<double> shifted = r.raw();
  for (auto& v : shifted) v += 2.5;
  HypothesisSpace space =
      build_space(m, {r, RewardFunction::state_based(shifted, 3)}, {1.0, 3.0});
  EXPECT_EQ(space.size(), 1);
  EXPECT_DOUBLE_EQ(space.prior()[0], 1.0);
  EXPECT_EQ(space.hypothesis_of_input(0), 0);
  EXPECT_EQ(space.hypothesis_of_input(1), 0);
}

TEST(BuildSpace, SignFlipKeepsBoth) {
  Mdp m = random_mdp_for_test(6, 3, 5);
  std::mt19937_64 rng(7);
  RewardFunction r = random_state_reward(6, 3, rng);
  std::vector<double> neg = r.raw();
  for (auto& v : neg) v = -v;
  HypothesisSpace space =
      build_space(m, {r, RewardFunction::state_based(neg, 3)}, {2.0, 6.0});
  ASSERT_EQ(space.size(), 2);
  EXPECT_NEAR(space.prior()[space.hypothesis_of_input(0)], 0.25, 1e-12);
  EXPECT_NEAR(space.prior()[space.hypothesis_of_input(1)], 0.75, 1e-12);
}

TEST(BuildSpace, LargePoolPriorsProportionalToWeights) {
  Mdp m = random_mdp_for_test(10, 5, 11, 0.95);
  std::mt19937_64 rng(13);
  std::vector<RewardFunction> pool;
  std::vector<double> weights;
  std::uniform_real_distribution<double> w(0.1, 1.0);
  for (int i = 0; i < 500; ++i) {
    pool.push_back(random_state_reward(10, 5, rng));
    weights.push_back(w(rng));
  }
  HypothesisSpace space = build_space(m, pool, weights);
  EXPECT_LE(space.size(), 500);
  EXPECT_GE(space.size(), 2);

  // Priors must be proportional to the input weights merged per hypothesis.
  std::vector<double> merged(space.size(), 0.0);
  double total = 0.0;
  for (int i = 0; i < 500; ++i) {
    merged[space.hypothesis_of_input(i)] += weights[i];
    total += weights[i];
  }
  double prior_sum = 0.0;
  for (int h = 0; h < space.size(); ++h) {
    EXPECT_NEAR(space.prior()[h], merged[h] / total, 1e-12);
    EXPECT_GT(space.prior()[h], 0.0);
    prior_sum += space.prior()[h];
  }
  EXPECT_NEAR(prior_sum, 1.0, 1e-12);
}

TEST(BuildSpace, EmptyRewardListRejected) {
  Mdp m = random_mdp_for_test(3, 2, 1);
  EXPECT_THROW(build_space(m, {}, {}), std::invalid_argument);
}

TEST(BuildSpace, DedupIdempotent) {
  Mdp m = random_mdp_for_test(8, 4, 17, 0.9);
  std::mt19937_64 rng(19);
  std::vector<RewardFunction> pool;
  for (int i = 0; i < 40; ++i) pool.push_back(random_state_reward(8, 4, rng));
  std::vector<double> weights(40, 1.0);
  HypothesisSpace a = build_space(m, pool, weights);
  HypothesisSpace b = build_space(m, pool, weights);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.prior(), b.prior());
  EXPECT_EQ(a.content_hash(), b.content_hash());
  for (int h = 0; h < a.size(); ++h)
    EXPECT_EQ(a.hypothesis(h).optimal_mask, b.hypothesis(h).optimal_mask);
}

TEST(Partition, SingleHypothesisCountsDistinctLabelVectors) {
  // One hypothesis over 3 states: states 0 and 2 share {a0}, state 1 is {a1}.
  HypothesisSpace space = space_from_labels(3, 2, {{0b01, 0b10, 0b01}}, {1.0});
  EXPECT_EQ(space.num_cells(), 2);
  EXPECT_EQ(space.partition().cell_of_state, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(space.partition().representatives, (std::vector<int>{0, 1}));
}

TEST(Partition, AllDistinctGivesOneCellPerState) {
  HypothesisSpace space = space_from_labels(3, 3, {{0b001, 0b010, 0b100}}, {1.0});
  EXPECT_EQ(space.num_cells(), 3);
}

TEST(Partition, PairIdenticalUnderAllHypotheses) {
  HypothesisSpace space = space_from_labels(
      3, 2, {{0b01, 0b10, 0b01}, {0b10, 0b10, 0b10}}, {1.0, 1.0});
  EXPECT_EQ(space.num_cells(), 2);
  EXPECT_EQ(space.partition().cell_of_state, (std::vector<int>{0, 1, 0}));
}

// Brute-force pairwise label comparison must reproduce the hashed partition.
TEST(Partition, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    int S = 3 + static_cast<int>(rng() % 48);
    int A = 2 + static_cast<int>(rng() % 3);
    int H = 1 + static_cast<int>(rng() % 8);
    std::vector<std::vector<std::uint64_t>> masks(H, std::vector<std::uint64_t>(S));
    for (auto& hm : masks)
      for (auto& m : hm) m = 1 + (rng() % ((1ull << A) - 1));
    std::vector<double> weights(H, 1.0);
    HypothesisSpace space = space_from_labels(S, A, masks, weights);

    const auto& cell = space.partition().cell_of_state;
    for (int x = 0; x < S; ++x)
      for (int y = 0; y < S; ++y) {
        bool same = true;
        for (int h = 0; h < space.size() && same; ++h)
          same = space.mask(h, x) == space.mask(h, y);
        EXPECT_EQ(cell[x] == cell[y], same) << "states " << x << "," << y;
      }
  }
}

TEST(SpaceFromLabels, RejectsEmptyOptimalSet) {
  EXPECT_THROW(space_from_labels(2, 2, {{0b01, 0b00}}, {1.0}), model_error);
}

TEST(NeighborGraph, SingleHypothesisIsComplete) {
  HypothesisSpace space = space_from_labels(3, 3, {{0b001, 0b010, 0b100}}, {1.0});
  NeighborGraph g = neighbor_graph(space, 1);
  EXPECT_EQ(static_cast<int>(g.edges.size()), 3);  // all pairs of 3 cells
  EXPECT_TRUE(is_k_neighborly(g));
}

TEST(NeighborGraph, TwoFlippingHypothesesNeedKTwo) {
  // Both hypotheses change their greedy set between the two cells.
  HypothesisSpace space =
      space_from_labels(2, 2, {{0b01, 0b10}, {0b10, 0b01}}, {1.0, 1.0});
  NeighborGraph g1 = neighbor_graph(space, 1);
  EXPECT_TRUE(g1.edges.empty());
  NeighborGraph g2 = neighbor_graph(space, 2);
  ASSERT_EQ(g2.edges.size(), 1u);
  EXPECT_EQ(g2.edge_disagreements[0], 2);
}

TEST(NeighborGraph, KAtLeastSizeIsComplete) {
  std::mt19937_64 rng(31);
  int S = 6, A = 3, H = 4;
  std::vector<std::vector<std::uint64_t>> masks(H, std::vector<std::uint64_t>(S));
  for (auto& hm : masks)
    for (auto& m : hm) m = 1 + (rng() % ((1ull << A) - 1));
  HypothesisSpace space = space_from_labels(S, A, masks, std::vector<double>(H, 1.0));
  NeighborGraph g = neighbor_graph(space, space.size());
  int n = space.num_cells();
  EXPECT_EQ(static_cast<int>(g.edges.size()), n * (n - 1) / 2);
  EXPECT_TRUE(is_k_neighborly(g));
}

TEST(IsKNeighborly, IsolatedCellFails) {
  NeighborGraph g;
  g.k = 1;
  g.num_cells = 3;
  g.edges = {{0, 1}};
  EXPECT_FALSE(is_k_neighborly(g));
}

TEST(IsKNeighborly, PathGraphPasses) {
  NeighborGraph g;
  g.k = 1;
  g.num_cells = 4;
  g.edges = {{0, 1}, {1, 2}, {2, 3}};
  EXPECT_TRUE(is_k_neighborly(g));
}

TEST(Coherence, ConstantHypothesisForcesOne) {
  // Second hypothesis labels a0 optimal in every cell.
  HypothesisSpace space =
      space_from_labels(3, 2, {{0b01, 0b10, 0b10}, {0b01, 0b01, 0b01}}, {1.0, 1.0});
  EXPECT_NEAR(coherence_parameter(space), 1.0, 1e-9);
}

TEST(Coherence, SymmetricPairGivesZero) {
  // Anti-symmetric pair: mu = (1/2, 1/2) makes both constraints active at 0.
  HypothesisSpace space =
      space_from_labels(2, 2, {{0b01, 0b10}, {0b10, 0b01}}, {1.0, 1.0});
  EXPECT_NEAR(coherence_parameter(space), 0.0, 1e-9);
}

// Exhaustive grid search over the simplex, used as the independent oracle
// for the LP on 3-cell instances.
double coherence_grid_oracle(const HypothesisSpace& space, double resolution) {
  EXPECT_EQ(space.num_cells(), 3);
  int steps = static_cast<int>(1.0 / resolution);
  double best = -1.0;
  for (int a = 0; a < space.num_actions(); ++a) {
    double inner = 2.0;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps - i; ++j) {
        double mu0 = i * resolution;
        double mu1 = j * resolution;
        double mu2 = 1.0 - mu0 - mu1;
        double worst = -2.0;
        for (int h = 0; h < space.size(); ++h) {
          double s = space.label(h, space.representative(0), a) * mu0 +
                     space.label(h, space.representative(1), a) * mu1 +
                     space.label(h, space.representative(2), a) * mu2;
          worst = std::max(worst, s);
        }
        inner = std::min(inner, worst);
      }
    best = std::max(best, inner);
  }
  return best;
}

TEST(Coherence, LpMatchesGridSearchOnThresholdFamily) {
  // Threshold family on a line: action a0 optimal below the threshold.
  HypothesisSpace space =
      space_from_labels(3, 2, {{0b01, 0b01, 0b10}, {0b01, 0b10, 0b10}}, {1.0, 1.0});
  double lp = coherence_parameter(space);
  double grid = coherence_grid_oracle(space, 1e-3);
  EXPECT_NEAR(lp, grid, 2e-3);
}

TEST(Coherence, LpMatchesGridSearchOnRandomInstances) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    int A = 2 + static_cast<int>(rng() % 2);
    int H = 2 + static_cast<int>(rng() % 4);
    std::vector<std::vector<std::uint64_t>> masks(H, std::vector<std::uint64_t>(3));
    for (auto& hm : masks)
      for (auto& m : hm) m = 1 + (rng() % ((1ull << A) - 1));
    HypothesisSpace space = space_from_labels(3, A, masks, std::vector<double>(H, 1.0));
    if (space.num_cells() != 3) continue;
    double lp = coherence_parameter(space);
    double grid = coherence_grid_oracle(space, 1e-3);
    EXPECT_NEAR(lp, grid, 2e-3) << "rep " << rep;
  }
}

// Removing a hypothesis can only shrink the inner max, so c* cannot grow.
TEST(Coherence, MonotoneUnderHypothesisRemoval) {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    int S = 4, A = 2;
    int H = 3 + static_cast<int>(rng() % 3);
    std::vector<std::vector<std::uint64_t>> masks(H, std::vector<std::uint64_t>(S));
    for (auto& hm : masks)
      for (auto& m : hm) m = 1 + (rng() % ((1ull << A) - 1));
    HypothesisSpace full = space_from_labels(S, A, masks, std::vector<double>(H, 1.0));
    double c_full = coherence_parameter(full);
    for (int drop = 0; drop < H && H > 2; ++drop) {
      std::vector<std::vector<std::uint64_t>> sub;
      for (int h = 0; h < H; ++h)
        if (h != drop) sub.push_back(masks[h]);
      HypothesisSpace s = space_from_labels(S, A, sub, std::vector<double>(sub.size(), 1.0));
      EXPECT_LE(coherence_parameter(s), c_full + 1e-9);
    }
  }
}

TEST(Coherence, CapacityGuard) {
  HypothesisSpace space =
      space_from_labels(2, 2, {{0b01, 0b10}, {0b10, 0b01}}, {1.0, 1.0});
  EXPECT_THROW(coherence_parameter(space, 3), capacity_error);
}

}  // namespace
