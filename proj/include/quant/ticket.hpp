// Write-once result handle for conserved consumer operations. A pending
// ticket is fulfilled by whichever producer delivers its value; state moves
// Pending->Fulfilled or Pending->Cancelled exactly once.
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <thread>

#include "quant/history.hpp"

namespace quant {

enum class TicketState : std::uint8_t { Pending, Fulfilled, Cancelled };

// Shared slot between the in-structure consumer node and the caller's ticket.
struct TicketCell {
  std::atomic<std::uint8_t> state{static_cast<std::uint8_t>(TicketState::Pending)};
  std::atomic<Item> value{0};
  std::atomic<std::int64_t> fulfill_ns{0};

  bool try_fulfill(Item v, std::int64_t now_ns) {
    value.store(v, std::memory_order_relaxed);
    fulfill_ns.store(now_ns, std::memory_order_relaxed);
    std::uint8_t expected = static_cast<std::uint8_t>(TicketState::Pending);
    return state.compare_exchange_strong(
        expected, static_cast<std::uint8_t>(TicketState::Fulfilled),
        std::memory_order_release, std::memory_order_relaxed);
  }

  bool try_cancel() {
    std::uint8_t expected = static_cast<std::uint8_t>(TicketState::Pending);
    return state.compare_exchange_strong(
        expected, static_cast<std::uint8_t>(TicketState::Cancelled),
        std::memory_order_acq_rel, std::memory_order_relaxed);
  }
};

class Ticket {
 public:
  Ticket() = default;

  // Consumer that completed immediately; no shared slot needed.
  static Ticket fulfilled(Item v, std::int64_t fulfill_ns) {
    Ticket t;
    t.inline_state_ = TicketState::Fulfilled;
    t.inline_value_ = v;
    t.inline_ns_ = fulfill_ns;
    return t;
  }

  static Ticket pending(std::shared_ptr<TicketCell> cell) {
    Ticket t;
    t.cell_ = std::move(cell);
    return t;
  }

  TicketState state() const {
    if (!cell_) return inline_state_;
    return static_cast<TicketState>(cell_->state.load(std::memory_order_acquire));
  }

  // Value if fulfilled, nullopt while pending or after cancellation.
  std::optional<Item> poll() const {
    if (state() != TicketState::Fulfilled) return std::nullopt;
    return cell_ ? cell_->value.load(std::memory_order_relaxed) : inline_value_;
  }

  std::int64_t fulfill_ns() const {
    return cell_ ? cell_->fulfill_ns.load(std::memory_order_relaxed) : inline_ns_;
  }

  // True iff this call performed the Pending->Cancelled transition.
  bool cancel() {
    if (!cell_) return false;
    return cell_->try_cancel();
  }

  // Spin/yield until fulfilled or cancelled; nullopt on cancellation.
  std::optional<Item> wait() const {
    for (int spins = 0;; ++spins) {
      TicketState s = state();
      if (s == TicketState::Fulfilled) return poll();
      if (s == TicketState::Cancelled) return std::nullopt;
      if (spins > 64) std::this_thread::yield();
    }
  }

 private:
  std::shared_ptr<TicketCell> cell_;
  TicketState inline_state_ = TicketState::Pending;
  Item inline_value_ = 0;
  std::int64_t inline_ns_ = 0;
};

}  // namespace quant
