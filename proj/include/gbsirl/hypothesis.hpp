#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbsirl/common.hpp"
#include "gbsirl/linprog.hpp"
#include "gbsirl/mdp.hpp"

namespace gbsirl {

constexpr std::int64_t kDefaultCoherenceCap = 10'000'000;

// One candidate task: the +/-1 labeling of (state, action) pairs that marks
// the greedy actions of a reward. Stored as one action bitmask per state.
struct Hypothesis {
  std::vector<std::uint64_t> optimal_mask;  // bit a set <=> h(x,a) = +1
  int source_reward_index = -1;

  int label(int x, int a) const { return (optimal_mask[x] >> a) & 1u ? 1 : -1; }
};

// Maximal sets of states on which every hypothesis is constant. Cell
// representatives are the smallest state index in each cell.
struct Partition {
  std::vector<int> cell_of_state;
  std::vector<int> representatives;
  int num_cells = 0;
};

struct NeighborGraph {
  int k = 0;
  int num_cells = 0;
  std::vector<std::pair<int, int>> edges;  // unordered pairs i < j with count <= k
  std::vector<int> edge_disagreements;     // aligned with edges
};

class HypothesisSpace;

namespace detail {
void dedup_and_finalize(HypothesisSpace& space, std::vector<std::vector<std::uint64_t>> masks,
                        const std::vector<double>& weights,
                        std::vector<RewardFunction> source_rewards);
}  // namespace detail

class HypothesisSpace {
 public:
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int size() const { return static_cast<int>(hypotheses_.size()); }

  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  const Hypothesis& hypothesis(int h) const { return hypotheses_[h]; }
  const std::vector<double>& prior() const { return prior_; }
  const Partition& partition() const { return partition_; }
  double tie_tol() const { return tie_tol_; }
  std::uint64_t content_hash() const { return content_hash_; }

  int label(int h, int x, int a) const { return hypotheses_[h].label(x, a); }
  std::uint64_t mask(int h, int x) const { return hypotheses_[h].optimal_mask[x]; }

  // Retained representative rewards, aligned with hypotheses. Empty when the
  // space was built from raw labels.
  const std::vector<RewardFunction>& rewards() const { return rewards_; }
  bool has_rewards() const { return !rewards_.empty(); }

  // Maps an input reward index to the hypothesis it merged into.
  int hypothesis_of_input(int input_index) const { return hypothesis_of_input_[input_index]; }

  int representative(int cell) const { return partition_.representatives[cell]; }
  int num_cells() const { return partition_.num_cells; }

  friend HypothesisSpace build_space(const Mdp&, const std::vector<RewardFunction>&,
                                     const std::vector<double>&, double, int);
  friend HypothesisSpace space_from_labels(int, int,
                                           const std::vector<std::vector<std::uint64_t>>&,
                                           const std::vector<double>&);
  friend void detail::dedup_and_finalize(HypothesisSpace&,
                                         std::vector<std::vector<std::uint64_t>>,
                                         const std::vector<double>&,
                                         std::vector<RewardFunction>);
  friend struct SpaceCodec;

 private:
  int num_states_ = 0;
  int num_actions_ = 0;
  double tie_tol_ = kDefaultTieTol;
  std::uint64_t content_hash_ = 0;
  std::vector<Hypothesis> hypotheses_;
  std::vector<double> prior_;
  std::vector<RewardFunction> rewards_;
  std::vector<int> hypothesis_of_input_;
  Partition partition_;
};

namespace detail {

struct MaskVectorHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    Fnv1a h;
    h.span(v);
    return static_cast<std::size_t>(h.state);
  }
};

// Deduplicates label arrays in input order, summing prior weights of merged
// duplicates, then renormalizes.
inline void dedup_and_finalize(HypothesisSpace& space,
                               std::vector<std::vector<std::uint64_t>> masks,
                               const std::vector<double>& weights,
                               std::vector<RewardFunction> source_rewards) {
  const int n = static_cast<int>(masks.size());
  std::unordered_map<std::vector<std::uint64_t>, int, MaskVectorHash> seen;
  seen.reserve(n);
  space.hypothesis_of_input_.assign(n, -1);
  std::vector<double> merged_weights;
  for (int i = 0; i < n; ++i) {
    for (int x = 0; x < space.num_states_; ++x)
      if (masks[i][x] == 0)
        throw model_error("hypothesis " + std::to_string(i) + " has no optimal action at state " +
                          std::to_string(x));
    auto it = seen.find(masks[i]);
    if (it == seen.end()) {
      int idx = static_cast<int>(space.hypotheses_.size());
      seen.emplace(masks[i], idx);
      space.hypotheses_.push_back(Hypothesis{std::move(masks[i]), i});
      merged_weights.push_back(weights[i]);
      if (!source_rewards.empty()) space.rewards_.push_back(std::move(source_rewards[i]));
      space.hypothesis_of_input_[i] = idx;
    } else {
      merged_weights[it->second] += weights[i];
      space.hypothesis_of_input_[i] = it->second;
    }
  }
  double total = std::accumulate(merged_weights.begin(), merged_weights.end(), 0.0);
  space.prior_.resize(merged_weights.size());
  for (std::size_t i = 0; i < merged_weights.size(); ++i)
    space.prior_[i] = merged_weights[i] / total;

  // Canonical label order. Index-based tie-breaks (MAP, argmin cells) must
  // not systematically favor whichever hypothesis happened to arrive first;
  // in particular the target reward always arrives at input index 0.
  const int h_count = static_cast<int>(space.hypotheses_.size());
  std::vector<int> order(h_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return space.hypotheses_[a].optimal_mask < space.hypotheses_[b].optimal_mask;
  });
  std::vector<int> rank(h_count);
  for (int i = 0; i < h_count; ++i) rank[order[i]] = i;

  std::vector<Hypothesis> hyp_sorted(h_count);
  std::vector<double> prior_sorted(h_count);
  std::vector<RewardFunction> rewards_sorted(space.rewards_.empty() ? 0 : h_count);
  for (int i = 0; i < h_count; ++i) {
    hyp_sorted[rank[i]] = std::move(space.hypotheses_[i]);
    prior_sorted[rank[i]] = space.prior_[i];
    if (!space.rewards_.empty()) rewards_sorted[rank[i]] = std::move(space.rewards_[i]);
  }
  space.hypotheses_ = std::move(hyp_sorted);
  space.prior_ = std::move(prior_sorted);
  space.rewards_ = std::move(rewards_sorted);
  for (int& h : space.hypothesis_of_input_) h = rank[h];
}

}  // namespace detail

// Groups states by their stacked label vector across all hypotheses; one
// hash pass, cells numbered by smallest member state.
inline Partition compute_partition(const HypothesisSpace& space) {
  Partition part;
  const int S = space.num_states();
  const int H = space.size();
  part.cell_of_state.assign(S, -1);
  std::unordered_map<std::vector<std::uint64_t>, int, detail::MaskVectorHash> cells;
  std::vector<std::uint64_t> column(H);
  for (int x = 0; x < S; ++x) {
    for (int h = 0; h < H; ++h) column[h] = space.mask(h, x);
    auto it = cells.find(column);
    if (it == cells.end()) {
      int idx = static_cast<int>(part.representatives.size());
      cells.emplace(column, idx);
      part.representatives.push_back(x);
      part.cell_of_state[x] = idx;
    } else {
      part.cell_of_state[x] = it->second;
    }
  }
  part.num_cells = static_cast<int>(part.representatives.size());
  return part;
}

// Solves every reward, labels greedy actions, deduplicates, and partitions.
// Per-reward solves run in parallel; results are ordered by input index
// before dedup so the space is independent of the worker count.
inline HypothesisSpace build_space(const Mdp& mdp, const std::vector<RewardFunction>& rewards,
                                   const std::vector<double>& prior_weights,
                                   double tie_tol = kDefaultTieTol, int workers = -1) {
  if (rewards.empty()) throw std::invalid_argument("reward list is empty");
  if (prior_weights.size() != rewards.size())
    throw std::invalid_argument("prior_weights length must match rewards");
  for (double w : prior_weights)
    if (!(w > 0.0)) throw std::invalid_argument("prior weights must be positive");
  if (mdp.num_actions() > 64) throw capacity_error("hypothesis spaces support at most 64 actions");

  HypothesisSpace space;
  space.num_states_ = mdp.num_states();
  space.num_actions_ = mdp.num_actions();
  space.tie_tol_ = tie_tol;

  Fnv1a hash;
  mdp.hash_into(hash);
  for (const auto& r : rewards) r.hash_into(hash);
  hash.f64(tie_tol);
  space.content_hash_ = hash.state;

  const int n = static_cast<int>(rewards.size());
  std::vector<std::vector<std::uint64_t>> masks(n);
  parallel_for(
      n,
      [&](std::int64_t i) {
        QFunction q = solve_q(mdp, rewards[i]);
        auto& m = masks[i];
        m.resize(mdp.num_states());
        for (int x = 0; x < mdp.num_states(); ++x) m[x] = greedy_mask(q, x, tie_tol);
      },
      workers < 0 ? worker_count() : workers);

  detail::dedup_and_finalize(space, std::move(masks), prior_weights, rewards);
  space.partition_ = compute_partition(space);
  return space;
}

// Builds a space directly from label masks (general multiclass use and
// constructed test instances). masks[h][x] is the +1-action bitmask.
inline HypothesisSpace space_from_labels(int num_states, int num_actions,
                                         const std::vector<std::vector<std::uint64_t>>& masks,
                                         const std::vector<double>& prior_weights) {
  if (masks.empty()) throw std::invalid_argument("label list is empty");
  if (prior_weights.size() != masks.size())
    throw std::invalid_argument("prior_weights length must match labels");
  HypothesisSpace space;
  space.num_states_ = num_states;
  space.num_actions_ = num_actions;

  Fnv1a hash;
  hash.u64(static_cast<std::uint64_t>(num_states));
  hash.u64(static_cast<std::uint64_t>(num_actions));
  for (const auto& m : masks) hash.span(m);
  space.content_hash_ = hash.state;

  detail::dedup_and_finalize(space, masks, prior_weights, {});
  space.partition_ = compute_partition(space);
  return space;
}

inline int disagreement_count(const HypothesisSpace& space, int cell_i, int cell_j) {
  int ri = space.representative(cell_i);
  int rj = space.representative(cell_j);
  int count = 0;
  for (int h = 0; h < space.size(); ++h) count += space.mask(h, ri) != space.mask(h, rj);
  return count;
}

// Exact disagreement counts over all cell pairs; edges are the pairs where
// at most k hypotheses label the two representatives differently.
inline NeighborGraph neighbor_graph(const HypothesisSpace& space, int k) {
  if (k < 1) throw std::invalid_argument("neighborhood order k must be >= 1");
  NeighborGraph g;
  g.k = k;
  g.num_cells = space.num_cells();
  for (int i = 0; i < g.num_cells; ++i)
    for (int j = i + 1; j < g.num_cells; ++j) {
      int count = disagreement_count(space, i, j);
      if (count <= k) {
        g.edges.emplace_back(i, j);
        g.edge_disagreements.push_back(count);
      }
    }
  return g;
}

// Definition of k-neighborliness: every two cells joined by a chain of
// k-neighbor pairs, i.e. the k-neighbor graph is connected.
inline bool is_k_neighborly(const NeighborGraph& graph) {
  if (graph.num_cells <= 1) return true;
  std::vector<int> parent(graph.num_cells);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = graph.num_cells;
  for (auto [i, j] : graph.edges) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

// Coherence parameter  c* = max_a min_mu max_h sum_i h([x]_i, a) mu(X_i),
// each inner min-max solved exactly as a finite linear program.
inline double coherence_parameter(const HypothesisSpace& space,
                                  std::int64_t cap = kDefaultCoherenceCap) {
  const int N = space.num_cells();
  const int H = space.size();
  if (static_cast<std::int64_t>(N) * H > cap)
    throw capacity_error(
        "coherence parameter needs N*|H| <= " + std::to_string(cap) +
        " (got " + std::to_string(static_cast<std::int64_t>(N) * H) +
        "); the v2 strategy does not need c*");

  double c_star = -1.0;
  std::vector<std::vector<double>> payoff(H, std::vector<double>(N));
  for (int a = 0; a < space.num_actions(); ++a) {
    for (int h = 0; h < H; ++h)
      for (int i = 0; i < N; ++i)
        payoff[h][i] = static_cast<double>(space.label(h, space.representative(i), a));
    c_star = std::max(c_star, min_max_game_value(payoff).value);
  }
  return std::min(1.0, std::max(-1.0, c_star));
}

}  // namespace gbsirl
