#pragma once

#include <cstdint>
#include <vector>

namespace pmgt {

namespace detail {

// SplitMix64 finalizer; full-period mixing of a 64-bit counter.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based per-agent random stream. The draw at (seed, agent, step) is a
// pure function of those three values, so results do not depend on thread
// scheduling or on how draws interleave across agents.
class AgentRng {
 public:
  AgentRng() = default;
  AgentRng(std::uint64_t master_seed, std::uint64_t agent)
      : key_(detail::splitmix64(master_seed ^
                                detail::splitmix64(0x61c8864680b583ebULL * (agent + 1)))) {}

  std::uint64_t next_u64() { return detail::splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1} (Lemire multiply-shift; bias < n / 2^64).
  int next_index(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >> 64);
  }

  std::uint64_t draws_taken() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// One deterministic stream per agent, all derived from a single master seed.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed, int agents) {
    streams_.reserve(agents);
    for (int i = 0; i < agents; ++i) streams_.emplace_back(master_seed, i);
  }

  AgentRng& agent(int i) { return streams_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(streams_.size()); }

 private:
  std::vector<AgentRng> streams_;
};

}  // namespace pmgt
