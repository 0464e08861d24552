#pragma once

#include <array>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gbsirl/mdp.hpp"

namespace gbsirl {

struct DomainSpec {
  std::string name;
  Mdp mdp;
  RewardFunction true_reward;
  int default_pool = 500;
};

// Transition rows drawn from a symmetric Dirichlet(1): normalized unit
// exponentials. Discount 0.95 across all benchmark domains.
inline Mdp random_mdp(int num_states, int num_actions, std::uint64_t seed) {
  if (num_states < 1 || num_actions < 1) throw std::invalid_argument("sizes must be >= 1");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<std::vector<std::pair<int, double>>> rows(
      static_cast<std::size_t>(num_states) * num_actions);
  for (auto& row : rows) {
    std::vector<double> w(num_states);
    double sum = 0.0;
    for (auto& v : w) {
      v = exp1(rng);
      sum += v;
    }
    row.reserve(num_states);
    for (int y = 0; y < num_states; ++y) row.push_back({y, w[y] / sum});
  }
  return Mdp::from_rows(num_states, num_actions, rows, 0.95);
}

// Distractor rewards with range and sparsity similar to the target: the
// nonzero-state count varies within +/-50% of the target's count (so some
// distractors end up with a larger sparsity prior than the target),
// positions uniform without replacement, values uniform over the target's
// nonzero state-value range. Element 0 is the target itself.
inline std::vector<RewardFunction> random_reward_pool(const Mdp& mdp,
                                                      const RewardFunction& true_reward,
                                                      int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("pool count must be >= 1");
  const int S = mdp.num_states();
  int true_count = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < S; ++x) {
    if (!true_reward.nonzero_at_state(x)) continue;
    ++true_count;
    double v = true_reward.state_value(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (true_count == 0) {
    lo = 0.0;
    hi = 1.0;
    true_count = 1;
  }
  const int count_lo = std::max(1, true_count - (true_count + 1) / 2);
  const int count_hi = std::min(S, true_count + (true_count + 1) / 2);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(lo, hi);
  std::uniform_int_distribution<int> pick_count(count_lo, count_hi);
  std::vector<RewardFunction> pool;
  pool.reserve(count);
  pool.push_back(true_reward);
  std::vector<int> all_states(S);
  std::iota(all_states.begin(), all_states.end(), 0);
  for (int i = 1; i < count; ++i) {
    int nonzero = pick_count(rng);
    std::vector<int> positions = all_states;
    for (int k = 0; k < nonzero; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, positions.size() - 1);
      std::swap(positions[k], positions[pick(rng)]);
    }
    std::vector<double> values(S, 0.0);
    for (int k = 0; k < nonzero; ++k) values[positions[k]] = val(rng);
    pool.push_back(RewardFunction::state_based(std::move(values), mdp.num_actions()));
  }
  return pool;
}

// Prior weights proportional to sparsity, shifted so dense rewards keep a
// positive weight.
inline std::vector<double> sparsity_prior_weights(const std::vector<RewardFunction>& pool,
                                                  double epsilon = 1e-3) {
  std::vector<double> w;
  w.reserve(pool.size());
  for (const auto& r : pool) w.push_back(r.sparsity() + epsilon);
  return w;
}

// Potential-based shaping folded into the state-action reward:
//   r'(x,a) = r(x,a) + discount * E[phi(x') | x,a] - phi(x).
// Optimal Q values shift by -phi(x), so greedy sets are preserved exactly.
inline RewardFunction shape_reward(const Mdp& mdp, const RewardFunction& reward,
                                   const std::vector<double>& potential) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<double> values(static_cast<std::size_t>(S) * A);
  for (int x = 0; x < S; ++x)
    for (int a = 0; a < A; ++a) {
      double next_phi = 0.0;
      mdp.for_row(a, x, [&](int y, double p) { next_phi += p * potential[y]; });
      values[static_cast<std::size_t>(x) * A + a] =
          reward.at(x, a) + mdp.discount() * next_phi - potential[x];
    }
  return RewardFunction(S, A, std::move(values));
}

inline DomainSpec random_domain(int num_states, int num_actions, std::uint64_t seed) {
  DomainSpec d;
  d.name = "random-" + std::to_string(num_states) + "x" + std::to_string(num_actions);
  d.mdp = random_mdp(num_states, num_actions, seed);
  // Target reward: half the states carry a uniform (0,1] value.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<int> states(num_states);
  std::iota(states.begin(), states.end(), 0);
  std::shuffle(states.begin(), states.end(), rng);
  int nonzero = std::max(1, num_states / 5);
  std::vector<double> values(num_states, 0.0);
  std::uniform_real_distribution<double> val(0.1, 1.0);
  for (int k = 0; k < nonzero; ++k) values[states[k]] = val(rng);
  d.true_reward = RewardFunction::state_based(std::move(values), num_actions);
  return d;
}

namespace detail {

// Grid helpers shared by the grid-shaped domains. Row 0 is the bottom.
struct Grid {
  int width = 0;
  int height = 0;
  int state(int row, int col) const { return row * width + col; }
  int row(int s) const { return s / width; }
  int col(int s) const { return s % width; }
  // Actions: 0 = up, 1 = down, 2 = right, 3 = left.
  static constexpr std::array<std::array<int, 2>, 4> kMoves = {
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
};

}  // namespace detail

// 20x20 puddle world: noisy directional moves (roll back one cell with
// probability 0.06, stay 0.24, advance one 0.4, two 0.24, three 0.06, all
// clipped at walls), goal +1 in the top-right corner, and a penalty inside
// the two puddles proportional to the squared distance to the puddle edge,
// scaled so the worst cell scores -1.
inline DomainSpec puddle_world() {
  constexpr int W = 20;
  detail::Grid grid{W, W};
  const int goal = grid.state(W - 1, W - 1);
  constexpr double kOffsets[5] = {-1, 0, 1, 2, 3};
  constexpr double kProbs[5] = {0.06, 0.24, 0.4, 0.24, 0.06};

  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(W) * W * 4);
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < W * W; ++s) {
      auto& row = rows[static_cast<std::size_t>(a) * W * W + s];
      if (s == goal) {
        row = {{goal, 1.0}};
        continue;
      }
      double acc[400] = {0.0};
      for (int k = 0; k < 5; ++k) {
        int r = grid.row(s) + static_cast<int>(kOffsets[k]) * detail::Grid::kMoves[a][0];
        int c = grid.col(s) + static_cast<int>(kOffsets[k]) * detail::Grid::kMoves[a][1];
        r = std::clamp(r, 0, W - 1);
        c = std::clamp(c, 0, W - 1);
        acc[grid.state(r, c)] += kProbs[k];
      }
      for (int y = 0; y < W * W; ++y)
        if (acc[y] > 0.0) row.push_back({y, acc[y]});
    }

  // Two capsule-shaped puddles in unit coordinates, radius 0.1: a horizontal
  // one at height 0.75 and a vertical one at x = 0.45.
  auto segment_distance = [](double px, double py, double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double len2 = vx * vx + vy * vy;
    double t = len2 == 0.0 ? 0.0 : std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
    double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::sqrt(dx * dx + dy * dy);
  };
  std::vector<double> depth(W * W, 0.0);
  double max_depth = 0.0;
  for (int s = 0; s < W * W; ++s) {
    double px = (grid.col(s) + 0.5) / W;
    double py = (grid.row(s) + 0.5) / W;
    double d1 = 0.1 - segment_distance(px, py, 0.10, 0.75, 0.45, 0.75);
    double d2 = 0.1 - segment_distance(px, py, 0.45, 0.40, 0.45, 0.80);
    depth[s] = std::max({0.0, d1, d2});
    max_depth = std::max(max_depth, depth[s]);
  }
  std::vector<double> reward(W * W, 0.0);
  for (int s = 0; s < W * W; ++s) reward[s] = -(depth[s] * depth[s]) / (max_depth * max_depth);
  reward[goal] = 1.0;

  DomainSpec d;
  d.name = "puddle";
  d.mdp = Mdp::from_rows(W * W, 4, rows, 0.95);
  d.true_reward = RewardFunction::state_based(std::move(reward), 4);
  return d;
}

namespace detail {

// Thin-wall maze layout on a (2H+1) x (2W+1) character canvas: cells at odd
// coordinates ('.', 'T', 'E', 'G'), wall slots between them ('#' blocks).
struct TrapLayout {
  int width = 0;
  int height = 0;
  std::vector<std::string> canvas;
  int goal = -1;
  std::vector<int> trap_region;  // -1 for non-trap cells
  std::vector<bool> is_exit;

  int state(int row, int col) const { return row * width + col; }
  char cell(int row, int col) const { return canvas[2 * row + 1][2 * col + 1]; }
  // Adjacent cells in cell coordinates; the midpoint canvas slot decides.
  bool wall_between(int r1, int c1, int r2, int c2) const {
    return canvas[r1 + r2 + 1][c1 + c2 + 1] == '#';
  }
};

inline TrapLayout parse_trap_layout(std::istream& in) {
  TrapLayout lay;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) lay.canvas.push_back(line);
  }
  if (lay.canvas.size() < 3 || lay.canvas.size() % 2 == 0)
    throw model_error("trap layout: canvas must have an odd number of rows >= 3");
  std::size_t cols = lay.canvas[0].size();
  for (const auto& row : lay.canvas)
    if (row.size() != cols) throw model_error("trap layout: ragged canvas rows");
  if (cols < 3 || cols % 2 == 0)
    throw model_error("trap layout: canvas must have an odd number of columns >= 3");
  lay.height = static_cast<int>(lay.canvas.size() / 2);
  lay.width = static_cast<int>(cols / 2);

  for (int r = 0; r < lay.height; ++r)
    for (int c = 0; c < lay.width; ++c) {
      char ch = lay.cell(r, c);
      if (ch != '.' && ch != 'T' && ch != 'E' && ch != 'G')
        throw model_error(std::string("trap layout: unexpected cell character '") + ch + "'");
      if (ch == 'G') {
        if (lay.goal >= 0) throw model_error("trap layout: multiple goal cells");
        lay.goal = lay.state(r, c);
      }
    }
  if (lay.goal < 0) throw model_error("trap layout: no goal cell");

  // Trap regions: wall-aware connected components of T/E cells.
  const int S = lay.width * lay.height;
  lay.trap_region.assign(S, -1);
  lay.is_exit.assign(S, false);
  int next_region = 0;
  for (int r = 0; r < lay.height; ++r)
    for (int c = 0; c < lay.width; ++c) {
      char ch = lay.cell(r, c);
      if (ch == 'E') lay.is_exit[lay.state(r, c)] = true;
      if ((ch != 'T' && ch != 'E') || lay.trap_region[lay.state(r, c)] >= 0) continue;
      std::vector<int> stack = {lay.state(r, c)};
      lay.trap_region[lay.state(r, c)] = next_region;
      while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        int sr = s / lay.width, sc = s % lay.width;
        for (const auto& mv : Grid::kMoves) {
          int nr = sr + mv[0], nc = sc + mv[1];
          if (nr < 0 || nr >= lay.height || nc < 0 || nc >= lay.width) continue;
          char nch = lay.cell(nr, nc);
          int ns = lay.state(nr, nc);
          if ((nch == 'T' || nch == 'E') && lay.trap_region[ns] < 0 &&
              !lay.wall_between(sr, sc, nr, nc)) {
            lay.trap_region[ns] = next_region;
            stack.push_back(ns);
          }
        }
      }
      ++next_region;
    }
  return lay;
}

}  // namespace detail

inline std::string default_data_dir() {
  if (const char* env = std::getenv("GBSIRL_DATA_DIR")) return env;
#ifdef GBSIRL_DATA_DIR
  return GBSIRL_DATA_DIR;
#else
  return "data";
#endif
}

// 30x30 grid-world split into 9 rooms, deterministic moves. Trap rooms can
// be entered freely but left only from their marked exit cell. Reward 1 on
// the goal, 0 elsewhere.
inline DomainSpec trap_world(const std::string& layout_path = default_data_dir() +
                                                              "/trap_world.txt") {
  std::ifstream in(layout_path);
  if (!in) throw model_error("trap layout: cannot open '" + layout_path + "'");
  detail::TrapLayout lay = detail::parse_trap_layout(in);

  const int S = lay.width * lay.height;
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(S) * 4);
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < S; ++s) {
      auto& row = rows[static_cast<std::size_t>(a) * S + s];
      if (s == lay.goal) {
        row = {{s, 1.0}};
        continue;
      }
      int r = s / lay.width, c = s % lay.width;
      int nr = r + detail::Grid::kMoves[a][0];
      int nc = c + detail::Grid::kMoves[a][1];
      int target = s;
      if (nr >= 0 && nr < lay.height && nc >= 0 && nc < lay.width &&
          !lay.wall_between(r, c, nr, nc)) {
        int t = lay.state(nr, nc);
        bool leaving_trap = lay.trap_region[s] >= 0 && lay.trap_region[t] != lay.trap_region[s];
        if (!leaving_trap || lay.is_exit[s]) target = t;
      }
      row = {{target, 1.0}};
    }

  std::vector<double> reward(S, 0.0);
  reward[lay.goal] = 1.0;

  DomainSpec d;
  d.name = "trap";
  d.mdp = Mdp::from_rows(S, 4, rows, 0.95);
  d.true_reward = RewardFunction::state_based(std::move(reward), 4);
  return d;
}

// Driver domain: the agent picks one of 5 lanes each step; three other cars
// cycle through the central lanes with a 5-row relative position code, so
// the state space factors as 5 * 15^3 = 16,875. Crashes cost -10, shoulder
// lanes -1, and each lane change -0.1 through the action's target lane.
inline DomainSpec driver_world() {
  constexpr int kLanes = 5;
  constexpr int kCarCodes = 15;  // 3 central lanes x 5 relative rows
  constexpr int kCars = 3;
  constexpr int S = kLanes * kCarCodes * kCarCodes * kCarCodes;

  auto car_lane = [](int code) { return 1 + code / 5; };
  auto car_row = [](int code) { return code % 5; };

  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(S) * kLanes);
  std::vector<double> reward(static_cast<std::size_t>(S) * kLanes, 0.0);
  for (int s = 0; s < S; ++s) {
    int rem = s;
    const int agent_lane = rem / (kCarCodes * kCarCodes * kCarCodes);
    rem %= kCarCodes * kCarCodes * kCarCodes;
    int codes[kCars];
    codes[0] = rem / (kCarCodes * kCarCodes);
    codes[1] = (rem / kCarCodes) % kCarCodes;
    codes[2] = rem % kCarCodes;

    bool crash = false;
    for (int code : codes) crash |= car_lane(code) == agent_lane && car_row(code) == 0;
    bool shoulder = agent_lane == 0 || agent_lane == kLanes - 1;

    // The faster agent closes in on the other cars by one row per step.
    int next_codes[kCars];
    for (int i = 0; i < kCars; ++i)
      next_codes[i] = (car_lane(codes[i]) - 1) * 5 + (car_row(codes[i]) + 4) % 5;
    int next_base =
        (next_codes[0] * kCarCodes + next_codes[1]) * kCarCodes + next_codes[2];

    for (int a = 0; a < kLanes; ++a) {
      int next = a * kCarCodes * kCarCodes * kCarCodes + next_base;
      rows[static_cast<std::size_t>(a) * S + s] = {{next, 1.0}};
      double r = 0.0;
      if (crash) r -= 10.0;
      if (shoulder) r -= 1.0;
      if (a != agent_lane) r -= 0.1;
      reward[static_cast<std::size_t>(s) * kLanes + a] = r;
    }
  }

  DomainSpec d;
  d.name = "driver";
  d.mdp = Mdp::from_rows(S, kLanes, rows, 0.95);
  d.true_reward = RewardFunction(S, kLanes, std::move(reward));
  return d;
}

// 19x10 grid-world with the goal in the top-right corner, deterministic
// moves. The sparse variant rewards only the goal; the shaped variant folds
// a Manhattan-distance potential into the reward, which leaves the optimal
// policy of every state unchanged while densifying the feedback.
inline DomainSpec grid_world_19x10(bool shaped) {
  constexpr int W = 19, H = 10;
  detail::Grid grid{W, H};
  const int goal = grid.state(H - 1, W - 1);
  const int S = W * H;

  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(S) * 4);
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < S; ++s) {
      int target = s;
      if (s != goal) {
        int nr = grid.row(s) + detail::Grid::kMoves[a][0];
        int nc = grid.col(s) + detail::Grid::kMoves[a][1];
        if (nr >= 0 && nr < H && nc >= 0 && nc < W) target = grid.state(nr, nc);
      }
      rows[static_cast<std::size_t>(a) * S + s] = {{target, 1.0}};
    }

  std::vector<double> sparse(S, 0.0);
  sparse[goal] = 1.0;

  DomainSpec d;
  d.name = shaped ? "grid19x10-shaped" : "grid19x10-sparse";
  d.mdp = Mdp::from_rows(S, 4, rows, 0.95);
  if (!shaped) {
    d.true_reward = RewardFunction::state_based(std::move(sparse), 4);
  } else {
    const double max_dist = (W - 1) + (H - 1);
    std::vector<double> phi(S);
    for (int s = 0; s < S; ++s)
      phi[s] = -(std::abs(grid.row(s) - (H - 1)) + std::abs(grid.col(s) - (W - 1))) / max_dist;
    d.true_reward =
        shape_reward(d.mdp, RewardFunction::state_based(std::move(sparse), 4), phi);
  }
  return d;
}

inline std::vector<std::string> domain_names() {
  return {"random-10x5", "puddle", "trap", "driver", "grid19x10-sparse", "grid19x10-shaped"};
}

// Registry lookup. "random-<S>x<A>" is parsed generically; other names are
// the fixed benchmark domains.
inline DomainSpec make_domain(const std::string& name, std::uint64_t domain_seed = 1) {
  if (name.rfind("random-", 0) == 0) {
    std::string dims = name.substr(7);
    auto x = dims.find('x');
    if (x == std::string::npos) throw std::invalid_argument("bad random domain name '" + name + "'");
    int S = std::stoi(dims.substr(0, x));
    int A = std::stoi(dims.substr(x + 1));
    return random_domain(S, A, domain_seed);
  }
  if (name == "puddle") return puddle_world();
  if (name == "trap") return trap_world();
  if (name == "driver") return driver_world();
  if (name == "grid19x10-sparse") return grid_world_19x10(false);
  if (name == "grid19x10-shaped") return grid_world_19x10(true);
  throw std::invalid_argument("unknown domain '" + name + "'");
}

}  // namespace gbsirl
