#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gbsirl/hypothesis.hpp"

namespace gbsirl {

enum class NoiseMode { PerAction, Aggregated };

// Learner-side noise estimates used in the Bayesian updates. PerAction ties
// the estimates through 1 - gamma_hat(x) = (|A|-1) beta_hat(x); Aggregated
// through beta_hat(x) + gamma_hat(x) = 1. sigma_hat scales the reward
// feedback likelihood exp(-(u - r(x))^2 / sigma_hat).
struct NoiseModel {
  NoiseMode mode = NoiseMode::PerAction;
  std::vector<double> beta_hat;
  std::vector<double> gamma_hat;
  double sigma_hat = 0.01;

  // Derives gamma_hat from beta_hat under the per-action constraint.
  static NoiseModel per_action(int num_states, int num_actions, double beta,
                               double sigma_hat = 0.01) {
    NoiseModel n;
    n.mode = NoiseMode::PerAction;
    n.beta_hat.assign(num_states, beta);
    n.gamma_hat.assign(num_states, 1.0 - (num_actions - 1) * beta);
    n.sigma_hat = sigma_hat;
    n.validate(num_actions);
    return n;
  }

  static NoiseModel aggregated(int num_states, double beta, double sigma_hat = 0.01) {
    NoiseModel n;
    n.mode = NoiseMode::Aggregated;
    n.beta_hat.assign(num_states, beta);
    n.gamma_hat.assign(num_states, 1.0 - beta);
    n.sigma_hat = sigma_hat;
    n.validate(2);
    return n;
  }

  void validate(int num_actions) const {
    if (beta_hat.size() != gamma_hat.size())
      throw std::invalid_argument("noise model arrays differ in length");
    for (std::size_t x = 0; x < beta_hat.size(); ++x) {
      double b = beta_hat[x], g = gamma_hat[x];
      if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("beta_hat must lie in (0,1) at state " + std::to_string(x));
      double constraint = mode == NoiseMode::PerAction ? (num_actions - 1) * b + g : b + g;
      if (std::abs(constraint - 1.0) > kRowStochasticTol)
        throw std::invalid_argument("noise estimates violate the mode constraint at state " +
                                    std::to_string(x));
      if (!(b < g))
        throw std::invalid_argument("beta_hat must be below gamma_hat at state " +
                                    std::to_string(x));
    }
    if (!(sigma_hat > 0.0)) throw std::invalid_argument("sigma_hat must be positive");
  }
};

struct Observation {
  enum class Kind { Action, Reward };
  Kind kind = Kind::Action;
  int state = 0;
  int action = 0;      // Kind::Action
  double value = 0.0;  // Kind::Reward
};

// Posterior over hypotheses, kept in the log domain. One max-shift
// normalization per update keeps 100-step products of small likelihoods
// well away from underflow.
struct Posterior {
  std::vector<double> log_probs;
  std::vector<Observation> history;

  static Posterior from_prior(const HypothesisSpace& space) {
    Posterior p;
    p.log_probs.resize(space.size());
    for (int h = 0; h < space.size(); ++h) p.log_probs[h] = std::log(space.prior()[h]);
    return p;
  }

  int size() const { return static_cast<int>(log_probs.size()); }
  double prob(int h) const { return std::exp(log_probs[h]); }

  void normalize() {
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : log_probs) max_log = std::max(max_log, v);
    double sum = 0.0;
    for (double v : log_probs) sum += std::exp(v - max_log);
    double shift = max_log + std::log(sum);
    for (double& v : log_probs) v -= shift;
  }
};

// Action-feedback update: hypotheses labeling (x, a) optimal are multiplied
// by gamma_hat(x), the rest by beta_hat(x), then renormalized. The same
// form serves the per-action and the aggregated noise model.
inline void update_action(Posterior& post, const HypothesisSpace& space, int x, int a,
                          const NoiseModel& noise) {
  const double log_gamma = std::log(noise.gamma_hat[x]);
  const double log_beta = std::log(noise.beta_hat[x]);
  for (int h = 0; h < space.size(); ++h)
    post.log_probs[h] += space.label(h, x, a) > 0 ? log_gamma : log_beta;
  post.normalize();
  post.history.push_back(Observation{Observation::Kind::Action, x, a, 0.0});
}

// Reward-feedback update: log-likelihood -(u - r_k(x))^2 / sigma_hat added
// per hypothesis through its retained source reward.
inline void update_reward(Posterior& post, const HypothesisSpace& space, int x, double u,
                          const NoiseModel& noise) {
  if (!(noise.sigma_hat > 0.0)) throw std::invalid_argument("sigma_hat must be positive");
  if (!space.has_rewards())
    throw std::invalid_argument("reward feedback needs a reward-built hypothesis space");
  for (int h = 0; h < space.size(); ++h) {
    double diff = u - space.rewards()[h].state_value(x);
    post.log_probs[h] -= diff * diff / noise.sigma_hat;
  }
  post.normalize();
  post.history.push_back(Observation{Observation::Kind::Reward, x, 0, u});
}

struct WeightedPrediction {
  double w = 0.0;  // max_a sum_h p(h) h(x, a)
  int action = 0;  // smallest action attaining the max
};

// W(p, x) and A*(p, x) at a cell representative.
inline WeightedPrediction weighted_prediction(const Posterior& post, const HypothesisSpace& space,
                                              int cell_index) {
  const int x = space.representative(cell_index);
  const int A = space.num_actions();
  std::vector<double> sums(A, 0.0);
  for (int h = 0; h < space.size(); ++h) {
    double p = post.prob(h);
    std::uint64_t mask = space.mask(h, x);
    for (int a = 0; a < A; ++a) sums[a] += (mask >> a) & 1u ? p : -p;
  }
  WeightedPrediction out{sums[0], 0};
  for (int a = 1; a < A; ++a)
    if (sums[a] > out.w) {
      out.w = sums[a];
      out.action = a;
    }
  return out;
}

inline int map_hypothesis(const Posterior& post) {
  int best = 0;
  for (int h = 1; h < post.size(); ++h)
    if (post.log_probs[h] > post.log_probs[best]) best = h;
  return best;
}

// A_c(p, x) = { a : sum_h p(h) h(x, a) > c_hat }. May be empty.
inline std::vector<int> predicted_optimal_set(const Posterior& post, const HypothesisSpace& space,
                                              int cell_index, double c_hat) {
  if (!(c_hat > 0.0 && c_hat < 1.0)) throw std::invalid_argument("c_hat must lie in (0,1)");
  const int x = space.representative(cell_index);
  std::vector<int> out;
  for (int a = 0; a < space.num_actions(); ++a) {
    double sum = 0.0;
    for (int h = 0; h < space.size(); ++h)
      sum += space.label(h, x, a) > 0 ? post.prob(h) : -post.prob(h);
    if (sum > c_hat) out.push_back(a);
  }
  return out;
}

// C_t = (1 - p_t(h*)) / p_t(h*), the odds placed on incorrect hypotheses.
inline double incorrect_mass_ratio(const Posterior& post, int true_index) {
  double p = post.prob(true_index);
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - p) / p;
}

}  // namespace gbsirl
