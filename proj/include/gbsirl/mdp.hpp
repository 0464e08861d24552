#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gbsirl/common.hpp"

namespace gbsirl {

constexpr double kDefaultSolveTol = 1e-8;
constexpr double kDefaultTieTol = 1e-6;
constexpr double kRowStochasticTol = 1e-9;

// Finite MDP. Transition rows are stored dense or compressed; compressed
// storage is selected automatically when fewer than 25% of entries are
// nonzero. Immutable after construction.
class Mdp {
 public:
  Mdp() = default;

  // rows[a * num_states + x] lists (next_state, probability) pairs.
  static Mdp from_rows(int num_states, int num_actions,
                       const std::vector<std::vector<std::pair<int, double>>>& rows,
                       double discount) {
    Mdp m;
    m.init(num_states, num_actions, discount);
    std::size_t nnz = 0;
    for (const auto& row : rows) nnz += row.size();
    double density =
        static_cast<double>(nnz) /
        (static_cast<double>(num_states) * num_states * num_actions);
    m.sparse_ = density < 0.25;
    if (m.sparse_) {
      m.row_ptr_.assign(rows.size() + 1, 0);
      m.col_.reserve(nnz);
      m.val_.reserve(nnz);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto [y, p] : rows[r]) {
          m.col_.push_back(y);
          m.val_.push_back(p);
        }
        m.row_ptr_[r + 1] = static_cast<std::int64_t>(m.col_.size());
      }
    } else {
      m.dense_.assign(static_cast<std::size_t>(num_actions) * num_states * num_states, 0.0);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (auto [y, p] : rows[r]) m.dense_[r * num_states + y] += p;
    }
    m.validate();
    return m;
  }

  // tensor[a][x][y] flattened as ((a * num_states) + x) * num_states + y.
  static Mdp from_dense(int num_states, int num_actions,
                        std::vector<double> tensor, double discount) {
    Mdp m;
    m.init(num_states, num_actions, discount);
    if (tensor.size() != static_cast<std::size_t>(num_actions) * num_states * num_states)
      throw std::invalid_argument("transition tensor has wrong size");
    m.sparse_ = false;
    m.dense_ = std::move(tensor);
    m.validate();
    return m;
  }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double discount() const { return discount_; }
  bool sparse() const { return sparse_; }

  double prob(int a, int x, int y) const {
    if (!sparse_) return dense_[(static_cast<std::size_t>(a) * num_states_ + x) * num_states_ + y];
    std::int64_t r = static_cast<std::int64_t>(a) * num_states_ + x;
    for (std::int64_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
      if (col_[i] == y) return val_[i];
    return 0.0;
  }

  // fn(next_state, probability) over the nonzero entries of row (a, x).
  template <typename F>
  void for_row(int a, int x, F&& fn) const {
    if (sparse_) {
      std::int64_t r = static_cast<std::int64_t>(a) * num_states_ + x;
      for (std::int64_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) fn(col_[i], val_[i]);
    } else {
      const double* row =
          dense_.data() + (static_cast<std::size_t>(a) * num_states_ + x) * num_states_;
      for (int y = 0; y < num_states_; ++y)
        if (row[y] != 0.0) fn(y, row[y]);
    }
  }

  void hash_into(Fnv1a& h) const {
    h.u64(static_cast<std::uint64_t>(num_states_));
    h.u64(static_cast<std::uint64_t>(num_actions_));
    h.f64(discount_);
    for (int a = 0; a < num_actions_; ++a)
      for (int x = 0; x < num_states_; ++x)
        for_row(a, x, [&](int y, double p) {
          h.u64(static_cast<std::uint64_t>(y));
          h.f64(p);
        });
  }

 private:
  void init(int num_states, int num_actions, double discount) {
    if (num_states < 1 || num_actions < 1)
      throw std::invalid_argument("MDP needs at least one state and one action");
    if (!(discount >= 0.0 && discount < 1.0))
      throw std::invalid_argument("discount must lie in [0, 1)");
    num_states_ = num_states;
    num_actions_ = num_actions;
    discount_ = discount;
  }

  void validate() const {
    for (int a = 0; a < num_actions_; ++a)
      for (int x = 0; x < num_states_; ++x) {
        double sum = 0.0;
        bool neg = false;
        for_row(a, x, [&](int y, double p) {
          (void)y;
          sum += p;
          if (p < 0.0) neg = true;
        });
        if (neg || std::abs(sum - 1.0) > kRowStochasticTol)
          throw model_error("transition row (a=" + std::to_string(a) + ", x=" +
                            std::to_string(x) + ") is not a probability distribution");
      }
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  double discount_ = 0.0;
  bool sparse_ = false;
  std::vector<double> dense_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

// Reward r(x, a). State-only rewards are broadcast across actions and keep
// a flag so serialization can stay compact.
class RewardFunction {
 public:
  RewardFunction() = default;

  RewardFunction(int num_states, int num_actions, std::vector<double> values)
      : num_states_(num_states), num_actions_(num_actions), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(num_states_) * num_actions_)
      throw std::invalid_argument("reward table has wrong size");
    check_finite();
  }

  static RewardFunction state_based(std::vector<double> state_values, int num_actions) {
    RewardFunction r;
    r.num_states_ = static_cast<int>(state_values.size());
    r.num_actions_ = num_actions;
    r.state_only_ = true;
    r.values_ = std::move(state_values);
    r.check_finite();
    return r;
  }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  bool state_only() const { return state_only_; }

  double at(int x, int a) const {
    return state_only_ ? values_[x] : values_[static_cast<std::size_t>(x) * num_actions_ + a];
  }

  // Scalar reward at a state; the mean over actions for state-action tables.
  double state_value(int x) const {
    if (state_only_) return values_[x];
    double s = 0.0;
    for (int a = 0; a < num_actions_; ++a) s += at(x, a);
    return s / num_actions_;
  }

  // Fraction of zero entries.
  double sparsity() const {
    std::size_t zero = 0;
    for (double v : values_) zero += v == 0.0;
    return static_cast<double>(zero) / static_cast<double>(values_.size());
  }

  bool nonzero_at_state(int x) const {
    if (state_only_) return values_[x] != 0.0;
    for (int a = 0; a < num_actions_; ++a)
      if (at(x, a) != 0.0) return true;
    return false;
  }

  const std::vector<double>& raw() const { return values_; }

  void hash_into(Fnv1a& h) const {
    h.u64(state_only_ ? 1 : 0);
    h.u64(static_cast<std::uint64_t>(num_states_));
    h.u64(static_cast<std::uint64_t>(num_actions_));
    h.span(values_);
  }

 private:
  void check_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("reward entries must be finite");
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  bool state_only_ = false;
  std::vector<double> values_;  // S*A row-major, or S when state_only_
};

struct QFunction {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> q;  // x*A + a
  double converged_residual = 0.0;

  double at(int x, int a) const { return q[static_cast<std::size_t>(x) * num_actions + a]; }
};

struct Policy {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> probs;  // x*A + a

  double at(int x, int a) const { return probs[static_cast<std::size_t>(x) * num_actions + a]; }

  static Policy uniform_over(int num_states, int num_actions,
                             const std::vector<std::uint64_t>& action_masks) {
    Policy p{num_states, num_actions,
             std::vector<double>(static_cast<std::size_t>(num_states) * num_actions, 0.0)};
    for (int x = 0; x < num_states; ++x) {
      int count = 0;
      for (int a = 0; a < num_actions; ++a) count += (action_masks[x] >> a) & 1u;
      if (count == 0) throw std::invalid_argument("policy support empty at state " + std::to_string(x));
      for (int a = 0; a < num_actions; ++a)
        if ((action_masks[x] >> a) & 1u)
          p.probs[static_cast<std::size_t>(x) * num_actions + a] = 1.0 / count;
    }
    return p;
  }

  void validate() const {
    for (int x = 0; x < num_states; ++x) {
      double sum = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        double v = at(x, a);
        if (v < 0.0) throw model_error("policy probability negative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowStochasticTol)
        throw model_error("policy row " + std::to_string(x) + " does not sum to 1");
    }
  }
};

namespace detail {
inline void check_shapes(const Mdp& mdp, const RewardFunction& reward) {
  if (reward.num_states() != mdp.num_states() || reward.num_actions() != mdp.num_actions())
    throw std::invalid_argument("reward shape does not match MDP");
}

// Successive-iterate threshold guaranteeing a Bellman residual below tol.
inline double stop_threshold(double tol, double discount) {
  if (discount == 0.0) return tol;
  return tol * (1.0 - discount) / (2.0 * discount);
}
}  // namespace detail

// Value iteration on the optimality recursion
//   Q(x,a) = r(x,a) + discount * sum_y P(y|x,a) max_b Q(y,b).
inline QFunction solve_q(const Mdp& mdp, const RewardFunction& reward,
                         double tol = kDefaultSolveTol) {
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  detail::check_shapes(mdp, reward);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const double g = mdp.discount();

  std::vector<double> v(S, 0.0), q(static_cast<std::size_t>(S) * A, 0.0);
  const double threshold = detail::stop_threshold(tol, g);
  double diff = std::numeric_limits<double>::infinity();
  // Discount < 1 makes the update a contraction, so this loop terminates.
  while (diff > threshold) {
    diff = 0.0;
    for (int x = 0; x < S; ++x) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double acc = 0.0;
        if (g != 0.0) {
          mdp.for_row(a, x, [&](int y, double p) { acc += p * v[y]; });
        }
        double nq = reward.at(x, a) + g * acc;
        double& cell = q[static_cast<std::size_t>(x) * A + a];
        diff = std::max(diff, std::abs(nq - cell));
        cell = nq;
        best = std::max(best, nq);
      }
      // Gauss-Seidel style in-place V update keeps iteration count down and
      // stays deterministic for fixed inputs.
      v[x] = best;
    }
    if (g == 0.0) break;
  }

  // One more Bellman application measures the residual actually achieved.
  double residual = 0.0;
  for (int x = 0; x < S; ++x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) best = std::max(best, q[static_cast<std::size_t>(x) * A + a]);
    v[x] = best;
  }
  for (int x = 0; x < S; ++x)
    for (int a = 0; a < A; ++a) {
      double acc = 0.0;
      mdp.for_row(a, x, [&](int y, double p) { acc += p * v[y]; });
      residual = std::max(residual,
                          std::abs(reward.at(x, a) + g * acc - q[static_cast<std::size_t>(x) * A + a]));
    }
  return QFunction{S, A, std::move(q), residual};
}

// Actions within tie_tol of the per-state maximum, as a bitmask.
inline std::uint64_t greedy_mask(const QFunction& q, int state, double tie_tol = kDefaultTieTol) {
  if (tie_tol < 0.0) throw std::invalid_argument("tie_tol must be nonnegative");
  if (q.num_actions > 64) throw capacity_error("greedy_mask supports at most 64 actions");
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < q.num_actions; ++a) best = std::max(best, q.at(state, a));
  std::uint64_t mask = 0;
  for (int a = 0; a < q.num_actions; ++a)
    if (q.at(state, a) >= best - tie_tol) mask |= 1ull << a;
  return mask;
}

inline std::vector<int> greedy_action_set(const QFunction& q, int state,
                                          double tie_tol = kDefaultTieTol) {
  std::uint64_t mask = greedy_mask(q, state, tie_tol);
  std::vector<int> out;
  for (int a = 0; a < q.num_actions; ++a)
    if ((mask >> a) & 1u) out.push_back(a);
  return out;
}

// Fixed point of V(x) = r_pi(x) + discount * sum_y P_pi(x,y) V(y).
inline std::vector<double> evaluate_policy(const Mdp& mdp, const RewardFunction& reward,
                                           const Policy& policy, double tol = kDefaultSolveTol) {
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  detail::check_shapes(mdp, reward);
  if (policy.num_states != mdp.num_states() || policy.num_actions != mdp.num_actions())
    throw std::invalid_argument("policy shape does not match MDP");
  policy.validate();

  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const double g = mdp.discount();
  std::vector<double> r_pi(S, 0.0);
  for (int x = 0; x < S; ++x)
    for (int a = 0; a < A; ++a) r_pi[x] += policy.at(x, a) * reward.at(x, a);

  std::vector<double> v(S, 0.0);
  const double threshold = detail::stop_threshold(tol, g);
  double diff = std::numeric_limits<double>::infinity();
  while (diff > threshold) {
    diff = 0.0;
    for (int x = 0; x < S; ++x) {
      double acc = 0.0;
      if (g != 0.0)
        for (int a = 0; a < A; ++a) {
          double pa = policy.at(x, a);
          if (pa == 0.0) continue;
          mdp.for_row(a, x, [&](int y, double p) { acc += pa * p * v[y]; });
        }
      double nv = r_pi[x] + g * acc;
      diff = std::max(diff, std::abs(nv - v[x]));
      v[x] = nv;
    }
    if (g == 0.0) break;
  }
  return v;
}

// Mean over states of V*(x) - V^policy(x) under true_reward.
inline double value_loss(const Mdp& mdp, const RewardFunction& true_reward,
                         const Policy& learned_policy, double tol = kDefaultSolveTol) {
  QFunction q = solve_q(mdp, true_reward, tol);
  std::vector<double> v_learned = evaluate_policy(mdp, true_reward, learned_policy, tol);
  double total = 0.0;
  for (int x = 0; x < mdp.num_states(); ++x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions(); ++a) best = std::max(best, q.at(x, a));
    total += best - v_learned[x];
  }
  return total / mdp.num_states();
}

}  // namespace gbsirl
