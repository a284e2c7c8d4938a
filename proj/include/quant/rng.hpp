// Thread-local xorshift streams, seeded per (structure instance, thread
// arrival order) from the instance's run seed so single-threaded runs are
// reproducible and threads never share generator state.
#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <utility>

namespace quant {

struct XorShift64 {
  std::uint64_t s = 0x9e3779b97f4a7c15ULL;

  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-instance stream registry. instance_id must be process-unique (an
// atomic counter), never a reused pointer.
class ThreadRngRegistry {
 public:
  static XorShift64& get(std::uint64_t instance_id, std::uint64_t base_seed,
                         std::atomic<std::uint64_t>& stream_counter) {
    // deque: references stay valid across later registrations
    thread_local std::deque<std::pair<std::uint64_t, XorShift64>> streams;
    for (auto& [id, rng] : streams)
      if (id == instance_id) return rng;
    std::uint64_t k = stream_counter.fetch_add(1);
    XorShift64 rng;
    rng.s = splitmix64(base_seed ^ splitmix64(k + 1));
    if (rng.s == 0) rng.s = 0x9e3779b97f4a7c15ULL;
    streams.emplace_back(instance_id, rng);
    return streams.back().second;
  }

  static std::uint64_t next_instance_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }
};

}  // namespace quant
