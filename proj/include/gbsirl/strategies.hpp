#pragma once

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gbsirl/bayes.hpp"
#include "gbsirl/oracle.hpp"

namespace gbsirl {

enum class StrategyKind { GbsV1, GbsV2, GbsV3, Random, Iqbc, Emg };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::GbsV2;
  double c_hat = 0.0;         // GbsV3 only
  std::uint64_t rng_seed = 0;
  bool iqbc_weighted = true;  // false = literal hypothesis counts
};

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::GbsV1: return "gbs-v1";
    case StrategyKind::GbsV2: return "gbs-v2";
    case StrategyKind::GbsV3: return "gbs-v3";
    case StrategyKind::Random: return "random";
    case StrategyKind::Iqbc: return "iqbc";
    case StrategyKind::Emg: return "emg";
  }
  return "?";
}

inline StrategyKind strategy_from_name(const std::string& s) {
  for (StrategyKind k : {StrategyKind::GbsV1, StrategyKind::GbsV2, StrategyKind::GbsV3,
                         StrategyKind::Random, StrategyKind::Iqbc, StrategyKind::Emg})
    if (s == strategy_name(k)) return k;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

namespace detail {
inline std::vector<WeightedPrediction> cell_predictions(const Posterior& post,
                                                        const HypothesisSpace& space) {
  std::vector<WeightedPrediction> out(space.num_cells());
  for (int i = 0; i < space.num_cells(); ++i) out[i] = weighted_prediction(post, space, i);
  return out;
}

inline int argmin_cell(const std::vector<WeightedPrediction>& preds) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(preds.size()); ++i)
    if (preds[i].w < preds[best].w) best = i;
  return best;
}
}  // namespace detail

// Version 1: prefer a 1-neighbor cell pair that disagrees on the predicted
// action while both sit strictly above the current minimum consensus; pick
// one of the two uniformly. Otherwise query the least-consensus cell.
inline int select_query_v1(const Posterior& post, const HypothesisSpace& space,
                           const NeighborGraph& graph_1, std::mt19937_64& rng) {
  auto preds = detail::cell_predictions(post, space);
  double c_t = preds[detail::argmin_cell(preds)].w;
  for (std::size_t e = 0; e < graph_1.edges.size(); ++e) {
    auto [i, j] = graph_1.edges[e];
    // Strict inequality, ties at c_t excluded.
    if (preds[i].w > c_t + 1e-12 && preds[j].w > c_t + 1e-12 &&
        preds[i].action != preds[j].action) {
      std::bernoulli_distribution coin(0.5);
      return coin(rng) ? j : i;
    }
  }
  return detail::argmin_cell(preds);
}

// Version 2: always query the cell minimizing W.
inline int select_query_v2(const Posterior& post, const HypothesisSpace& space) {
  auto preds = detail::cell_predictions(post, space);
  return detail::argmin_cell(preds);
}

struct QueryDecision {
  bool stop = false;
  int cell = -1;       // valid when !stop
  int map_index = -1;  // valid when stop
};

// Version 3: query while min_i W < c_hat, otherwise return the MAP estimate.
inline QueryDecision select_query_v3(const Posterior& post, const HypothesisSpace& space,
                                     double c_hat) {
  if (!(c_hat > 0.0 && c_hat < 1.0)) throw std::invalid_argument("c_hat must lie in (0,1)");
  auto preds = detail::cell_predictions(post, space);
  int cell = detail::argmin_cell(preds);
  if (preds[cell].w < c_hat) return QueryDecision{false, cell, -1};
  return QueryDecision{true, -1, map_hypothesis(post)};
}

inline int select_query_random(const HypothesisSpace& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, space.num_cells() - 1);
  return pick(rng);
}

// Vote entropy VE(x) = -sum_a q(x,a) log q(x,a). Weighted mode replaces the
// hypothesis counts with posterior mass, which keeps the criterion adaptive
// after the first query; literal mode follows the published count formula.
inline int select_query_iqbc(const Posterior& post, const HypothesisSpace& space,
                             bool weighted = true) {
  int best_cell = 0;
  double best_ve = -1.0;
  const int H = space.size();
  for (int i = 0; i < space.num_cells(); ++i) {
    int x = space.representative(i);
    double ve = 0.0;
    for (int a = 0; a < space.num_actions(); ++a) {
      double q = 0.0;
      for (int h = 0; h < H; ++h) {
        if ((space.mask(h, x) >> a) & 1u) q += weighted ? post.prob(h) : 1.0 / H;
      }
      if (q > 0.0) ve -= q * std::log(q);
    }
    if (ve > best_ve + 1e-15) {
      best_ve = ve;
      best_cell = i;
    }
  }
  return best_cell;
}

// Expected myopic gain (Cohn et al.) is only referenced, never specified,
// in the material this library follows.
inline int select_query_emg(const Posterior&, const HypothesisSpace&) {
  throw std::logic_error("EMG querying is a stub; no specification is available");
}

// Reward-query selection: partition the retained rewards by their greedy
// action at the state an action query would target, then pick the state
// whose reward value best separates the parts. Separation is scored as the
// posterior-weighted between-part variance over the within-part variance.
inline int select_reward_query(const Posterior& post, const HypothesisSpace& space) {
  if (!space.has_rewards())
    throw std::invalid_argument("reward queries need a reward-built hypothesis space");
  auto preds = detail::cell_predictions(post, space);
  const int x_action = space.representative(detail::argmin_cell(preds));
  const int H = space.size();

  // Multi-optimal rewards go to their smallest greedy action.
  std::vector<std::vector<int>> parts(space.num_actions());
  for (int h = 0; h < H; ++h) {
    std::uint64_t mask = space.mask(h, x_action);
    int a = std::countr_zero(mask);
    parts[a].push_back(h);
  }

  std::vector<double> part_mass(space.num_actions(), 0.0);
  int nonempty = 0;
  for (int a = 0; a < space.num_actions(); ++a) {
    for (int h : parts[a]) part_mass[a] += post.prob(h);
    if (part_mass[a] > 0.0) ++nonempty;
  }
  if (nonempty < 2) return x_action;

  int best_state = 0;
  double best_score = -1.0;
  for (int s = 0; s < space.num_states(); ++s) {
    double grand = 0.0;
    std::vector<double> means(space.num_actions(), 0.0);
    for (int a = 0; a < space.num_actions(); ++a) {
      if (part_mass[a] <= 0.0) continue;
      double m = 0.0;
      for (int h : parts[a]) m += post.prob(h) * space.rewards()[h].state_value(s);
      means[a] = m / part_mass[a];
      grand += m;
    }
    double between = 0.0, within = 0.0;
    for (int a = 0; a < space.num_actions(); ++a) {
      if (part_mass[a] <= 0.0) continue;
      double d = means[a] - grand;
      between += part_mass[a] * d * d;
      for (int h : parts[a]) {
        double e = space.rewards()[h].state_value(s) - means[a];
        within += post.prob(h) * e * e;
      }
    }
    double score = between / (within + 1e-9);
    if (score > best_score + 1e-15) {
      best_score = score;
      best_state = s;
    }
  }
  return best_state;
}

// Theorem-rate parameters. lambda = epsilon * min((1 - c*)/2, 1/4) and the
// query budget from the sample-complexity corollary,
//   t_min = ceil((1 / lambda) * ln(|H| / delta)).
struct BoundParams {
  double epsilon = 0.0;
  double c_star = 0.0;
  double lambda = 0.0;
  int h_size = 0;
  double delta = 0.0;
  long long t_min = -1;
  bool degenerate = false;
  std::string warning;
};

inline BoundParams bound_from_parameters(double epsilon, double c_star, int h_size,
                                         double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  BoundParams b;
  b.epsilon = epsilon;
  b.c_star = c_star;
  b.h_size = h_size;
  b.delta = delta;
  b.lambda = epsilon * std::min((1.0 - c_star) / 2.0, 0.25);
  if (!(b.lambda > 0.0)) {
    b.lambda = std::max(b.lambda, 0.0);
    b.degenerate = true;
    b.warning =
        "epsilon*min((1-c*)/2,1/4) is not positive; the exponential rate is vacuous. "
        "Exact noise estimates (beta_hat = beta*, gamma_hat = gamma*) always land here.";
    return b;
  }
  b.t_min = static_cast<long long>(std::ceil(std::log(h_size / delta) / b.lambda));
  return b;
}

// Assembles the rate parameters from a space, the learner's noise model and
// the true oracle noise (diagnostic use: the oracle is known only in
// simulation). The oracle side follows the noise mode: per-action values
// for PerAction, total optimal/suboptimal probabilities for Aggregated.
inline BoundParams compute_bound(const HypothesisSpace& space, const NoiseModel& noise,
                                 const ExpertOracle& oracle, double delta,
                                 std::int64_t coherence_cap = kDefaultCoherenceCap) {
  const int S = space.num_states();
  if (static_cast<int>(noise.beta_hat.size()) != S || oracle.num_states() != S)
    throw std::invalid_argument("noise model, oracle and space disagree on the state count");

  double alpha = 0.0;
  for (int x = 0; x < S; ++x)
    alpha = std::max(alpha, noise.mode == NoiseMode::PerAction ? oracle.beta_star(x)
                                                               : oracle.aggregated_beta(x));
  for (int x = 0; x < S; ++x)
    if (noise.beta_hat[x] < alpha - 1e-12)
      throw std::invalid_argument("beta_hat at state " + std::to_string(x) +
                                  " is below the maximum oracle noise level alpha=" +
                                  std::to_string(alpha));

  double epsilon = std::numeric_limits<double>::infinity();
  for (int x = 0; x < S; ++x) {
    double bs = noise.mode == NoiseMode::PerAction ? oracle.beta_star(x)
                                                   : oracle.aggregated_beta(x);
    double gs = noise.mode == NoiseMode::PerAction ? oracle.gamma_star(x)
                                                   : oracle.aggregated_gamma(x);
    double bh = noise.beta_hat[x];
    double gh = noise.gamma_hat[x];
    epsilon = std::min(epsilon, gs * (gh - bh) / gh + bs * (bh - gh) / bh);
  }
  double c_star = coherence_parameter(space, coherence_cap);
  return bound_from_parameters(epsilon, c_star, space.size(), delta);
}

}  // namespace gbsirl
