#pragma once

#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gbsirl/mdp.hpp"

namespace gbsirl {

// Simulated noisy expert. Actions follow the perturbed optimal policy: each
// suboptimal action is drawn with probability beta_star(x), each optimal one
// with gamma_star(x). beta_star is the primitive; gamma_star(x) is derived
// per state so the probabilities normalize,
//   |A*(x)| gamma_star(x) + (|A| - |A*(x)|) beta_star(x) = 1.
// Reward queries return r*(x) plus Gaussian noise of variance sigma/2, i.e.
// the density proportional to exp(-(u - r*(x))^2 / sigma).
class ExpertOracle {
 public:
  static ExpertOracle from_reward(const Mdp& mdp, const RewardFunction& true_reward,
                                  double beta_star, double sigma = 0.0,
                                  double tie_tol = kDefaultTieTol) {
    QFunction q = solve_q(mdp, true_reward);
    std::vector<std::uint64_t> optimal(mdp.num_states());
    for (int x = 0; x < mdp.num_states(); ++x) optimal[x] = greedy_mask(q, x, tie_tol);
    return ExpertOracle(mdp.num_actions(), std::move(optimal),
                        std::vector<double>(mdp.num_states(), beta_star), sigma, true_reward);
  }

  // For spaces constructed from raw labels: optimal_mask[x] marks A*(x).
  static ExpertOracle from_labels(int num_actions, std::vector<std::uint64_t> optimal_mask,
                                  double beta_star, double sigma = 0.0,
                                  RewardFunction true_reward = {}) {
    std::vector<double> beta(optimal_mask.size(), beta_star);
    return ExpertOracle(num_actions, std::move(optimal_mask), std::move(beta), sigma,
                        std::move(true_reward));
  }

  ExpertOracle(int num_actions, std::vector<std::uint64_t> optimal_mask,
               std::vector<double> beta_star, double sigma, RewardFunction true_reward = {})
      : num_actions_(num_actions),
        optimal_mask_(std::move(optimal_mask)),
        beta_star_(std::move(beta_star)),
        sigma_(sigma),
        true_reward_(std::move(true_reward)) {
    if (!(sigma_ >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    const int S = static_cast<int>(optimal_mask_.size());
    gamma_star_.resize(S);
    alpha_ = 0.0;
    for (int x = 0; x < S; ++x) {
      int opt = std::popcount(optimal_mask_[x]);
      if (opt == 0) throw model_error("oracle has no optimal action at state " + std::to_string(x));
      double b = beta_star_[x];
      if (!(b >= 0.0)) throw std::invalid_argument("beta_star must be nonnegative");
      double g = (1.0 - (num_actions_ - opt) * b) / opt;
      if (g < b - 1e-12)
        throw std::invalid_argument("beta_star " + std::to_string(b) +
                                    " exceeds the normalized optimal-action probability at state " +
                                    std::to_string(x));
      gamma_star_[x] = g;
      alpha_ = std::max(alpha_, b);
    }
  }

  int num_actions() const { return num_actions_; }
  int num_states() const { return static_cast<int>(optimal_mask_.size()); }
  const std::vector<std::uint64_t>& optimal_sets() const { return optimal_mask_; }
  std::uint64_t optimal_mask(int x) const { return optimal_mask_[x]; }
  double beta_star(int x) const { return beta_star_[x]; }
  double gamma_star(int x) const { return gamma_star_[x]; }
  double alpha() const { return alpha_; }
  double sigma() const { return sigma_; }
  const RewardFunction& true_reward() const { return true_reward_; }

  // Probability of the expert playing a wrong / an optimal action at all,
  // the values the aggregated noise model estimates.
  double aggregated_gamma(int x) const {
    return gamma_star_[x] * std::popcount(optimal_mask_[x]);
  }
  double aggregated_beta(int x) const { return 1.0 - aggregated_gamma(x); }

  int sample_action(int x, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng);
    double acc = 0.0;
    for (int a = 0; a < num_actions_; ++a) {
      acc += (optimal_mask_[x] >> a) & 1u ? gamma_star_[x] : beta_star_[x];
      if (u < acc) return a;
    }
    return num_actions_ - 1;  // guards against accumulated rounding
  }

  double sample_reward(int x, std::mt19937_64& rng) const {
    double r = true_reward_.state_value(x);
    if (sigma_ == 0.0) return r;
    std::normal_distribution<double> noise(0.0, std::sqrt(sigma_ / 2.0));
    return r + noise(rng);
  }

 private:
  int num_actions_ = 0;
  std::vector<std::uint64_t> optimal_mask_;
  std::vector<double> beta_star_;
  std::vector<double> gamma_star_;
  double alpha_ = 0.0;
  double sigma_ = 0.0;
  RewardFunction true_reward_;
};

}  // namespace gbsirl
