// Epoch-based reclamation. A Guard pins the current epoch in a slot for the
// duration of one operation; retired nodes are freed once the global epoch
// has advanced two steps past their retirement epoch, which cannot happen
// while any pinned guard might still hold a pre-unlink reference. Limbo
// lists belong to slots, not threads, so short-lived worker threads do not
// leak slots: whoever next occupies a slot sweeps its leftovers.
#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

namespace quant {

class EpochDomain {
 public:
  static constexpr std::size_t kSlots = 64;
  static constexpr std::uint64_t kIdle = ~0ULL;
  static constexpr std::size_t kSweepBatch = 64;

  EpochDomain() = default;
  ~EpochDomain() {
    for (Slot& s : slots_)
      for (Retired& r : s.limbo) r.deleter(r.ptr);
  }
  EpochDomain(const EpochDomain&) = delete;
  EpochDomain& operator=(const EpochDomain&) = delete;

  class Guard {
   public:
    explicit Guard(EpochDomain& d) : d_(d), slot_(d.acquire_slot()) {
      d_.slots_[slot_].epoch.store(d_.global_.load());
    }

    ~Guard() {
      Slot& s = d_.slots_[slot_];
      if (s.limbo.size() >= kSweepBatch) d_.sweep(s);
      s.epoch.store(kIdle);
      s.claimed.store(false, std::memory_order_release);
    }

    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

    template <typename T>
    void retire(T* p) {
      d_.slots_[slot_].limbo.push_back(
          Retired{p, [](void* q) { delete static_cast<T*>(q); },
                  d_.global_.load()});
    }

   private:
    EpochDomain& d_;
    std::size_t slot_;
  };

 private:
  struct Retired {
    void* ptr;
    void (*deleter)(void*);
    std::uint64_t epoch;
  };

  struct alignas(64) Slot {
    std::atomic<bool> claimed{false};
    std::atomic<std::uint64_t> epoch{kIdle};
    std::vector<Retired> limbo;  // touched only by the claiming guard
  };

  std::size_t acquire_slot() {
    for (;;) {
      for (std::size_t i = 0; i < kSlots; ++i) {
        bool expected = false;
        if (!slots_[i].claimed.load(std::memory_order_relaxed) &&
            slots_[i].claimed.compare_exchange_strong(expected, true,
                                                      std::memory_order_acquire))
          return i;
      }
      // More concurrent guards than slots; rare and transient.
    }
  }

  void sweep(Slot& s) {
    try_advance();
    std::uint64_t safe = global_.load();
    std::size_t kept = 0;
    for (Retired& r : s.limbo) {
      if (r.epoch + 2 <= safe)
        r.deleter(r.ptr);
      else
        s.limbo[kept++] = r;
    }
    s.limbo.resize(kept);
  }

  void try_advance() {
    std::uint64_t e = global_.load();
    for (const Slot& s : slots_) {
      std::uint64_t pinned = s.epoch.load();
      if (pinned != kIdle && pinned < e) return;
    }
    global_.compare_exchange_strong(e, e + 1);
  }

  std::atomic<std::uint64_t> global_{0};
  std::array<Slot, kSlots> slots_;
};

}  // namespace quant
