#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbsirl/bayes.hpp"
#include "gbsirl/hypothesis.hpp"

namespace gbsirl {

// Binary hypothesis-space image, so expensive builds are reusable between
// runs. Content-addressed by the hash of (mdp, rewards, tie_tol) computed
// at build time. Little-endian host assumed.
constexpr std::uint32_t kSpaceMagic = 0x47425353;  // "GBSS"
constexpr std::uint32_t kSpaceVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw model_error("space file: truncated");
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  write_pod(out, static_cast<std::uint64_t>(v.size()));
  if (!v.empty()) out.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

template <typename T>
void read_vec(std::istream& in, std::vector<T>& v) {
  std::uint64_t n = 0;
  read_pod(in, n);
  v.resize(n);
  if (n) {
    in.read(reinterpret_cast<char*>(v.data()), n * sizeof(T));
    if (!in) throw model_error("space file: truncated");
  }
}

}  // namespace detail

struct SpaceCodec {
  static void save(const HypothesisSpace& space, std::ostream& out) {
    using namespace detail;
    write_pod(out, kSpaceMagic);
    write_pod(out, kSpaceVersion);
    write_pod(out, space.content_hash_);
    write_pod(out, static_cast<std::int32_t>(space.num_states_));
    write_pod(out, static_cast<std::int32_t>(space.num_actions_));
    write_pod(out, space.tie_tol_);

    write_pod(out, static_cast<std::int32_t>(space.hypotheses_.size()));
    for (const auto& h : space.hypotheses_) {
      write_pod(out, static_cast<std::int32_t>(h.source_reward_index));
      write_vec(out, h.optimal_mask);
    }
    write_vec(out, space.prior_);
    write_vec(out, space.hypothesis_of_input_);
    write_pod(out, static_cast<std::int32_t>(space.partition_.num_cells));
    write_vec(out, space.partition_.cell_of_state);
    write_vec(out, space.partition_.representatives);

    write_pod(out, static_cast<std::uint8_t>(space.rewards_.empty() ? 0 : 1));
    for (const auto& r : space.rewards_) {
      write_pod(out, static_cast<std::uint8_t>(r.state_only() ? 1 : 0));
      write_vec(out, r.raw());
    }
  }

  static HypothesisSpace load(std::istream& in) {
    using namespace detail;
    std::uint32_t magic = 0, version = 0;
    read_pod(in, magic);
    read_pod(in, version);
    if (magic != kSpaceMagic) throw model_error("space file: bad magic");
    if (version != kSpaceVersion)
      throw model_error("space file: unsupported version " + std::to_string(version));

    HypothesisSpace space;
    std::int32_t s32 = 0;
    read_pod(in, space.content_hash_);
    read_pod(in, s32);
    space.num_states_ = s32;
    read_pod(in, s32);
    space.num_actions_ = s32;
    read_pod(in, space.tie_tol_);

    std::int32_t h_count = 0;
    read_pod(in, h_count);
    space.hypotheses_.resize(h_count);
    for (auto& h : space.hypotheses_) {
      read_pod(in, s32);
      h.source_reward_index = s32;
      read_vec(in, h.optimal_mask);
    }
    read_vec(in, space.prior_);
    read_vec(in, space.hypothesis_of_input_);
    read_pod(in, s32);
    space.partition_.num_cells = s32;
    read_vec(in, space.partition_.cell_of_state);
    read_vec(in, space.partition_.representatives);

    std::uint8_t has_rewards = 0;
    read_pod(in, has_rewards);
    if (has_rewards) {
      space.rewards_.reserve(h_count);
      for (int i = 0; i < h_count; ++i) {
        std::uint8_t state_only = 0;
        read_pod(in, state_only);
        std::vector<double> values;
        read_vec(in, values);
        space.rewards_.push_back(
            state_only ? RewardFunction::state_based(std::move(values), space.num_actions_)
                       : RewardFunction(space.num_states_, space.num_actions_, std::move(values)));
      }
    }
    return space;
  }
};

inline void save_space(const HypothesisSpace& space, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw model_error("cannot write space file '" + path + "'");
  SpaceCodec::save(space, out);
}

inline HypothesisSpace load_space(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error("cannot open space file '" + path + "'");
  return SpaceCodec::load(in);
}

inline std::string space_cache_file(const HypothesisSpace& space, const std::string& cache_dir) {
  return cache_dir + "/" + hex64(space.content_hash()) + ".space";
}

// Posterior snapshot for debugging: hypothesis index -> probability plus
// the observation history.
inline nlohmann::json posterior_to_json(const Posterior& post) {
  nlohmann::json j;
  j["format"] = "gbsirl-posterior";
  j["version"] = 1;
  nlohmann::json probs = nlohmann::json::object();
  for (int h = 0; h < post.size(); ++h) probs[std::to_string(h)] = post.prob(h);
  j["probs"] = probs;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& o : post.history) {
    nlohmann::json e;
    e["state"] = o.state;
    if (o.kind == Observation::Kind::Action) {
      e["kind"] = "action";
      e["action"] = o.action;
    } else {
      e["kind"] = "reward";
      e["value"] = o.value;
    }
    hist.push_back(e);
  }
  j["history"] = hist;
  return j;
}

}  // namespace gbsirl
