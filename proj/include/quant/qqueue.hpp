// Conserving lock-free queue: an array of independent linked sublists, each
// a two-CAS queue with head/tail sentinels. An operation picks a sublist at
// random; arrival at a sublist whose resident kind is opposite fulfills the
// oldest waiting node, same kind appends. A sublist therefore never mixes
// ENQ and DEQ nodes, dequeues are fulfilled in per-sublist insertion order,
// and no operation reports emptiness.
#pragma once

#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "quant/epoch.hpp"
#include "quant/history.hpp"
#include "quant/rng.hpp"
#include "quant/ticket.hpp"

namespace quant {

enum class QueueOp : std::uint8_t { Enq, Deq };

struct QQueueConfig {
  std::size_t width = 0;  // 0: use hardware concurrency
  std::uint64_t seed = 0x9E1F0C5D;
};

class QQueue {
 public:
  explicit QQueue(QQueueConfig cfg = {})
      : id_(ThreadRngRegistry::next_instance_id()), cfg_(cfg) {
    if (cfg_.width == 0) {
      unsigned hw = std::thread::hardware_concurrency();
      cfg_.width = hw ? hw : 1;
    }
    assert(cfg_.width >= 1);
    sublists_ = std::make_unique<SubList[]>(cfg_.width);
    for (std::size_t i = 0; i < cfg_.width; ++i) {
      Node* sentinel = new Node;
      sublists_[i].head.store(sentinel);
      sublists_[i].tail.store(sentinel);
    }
  }

  ~QQueue() {
    for (std::size_t i = 0; i < cfg_.width; ++i) {
      Node* n = sublists_[i].head.load();
      while (n != nullptr) {
        Node* next = n->next.load();
        delete n;
        n = next;
      }
    }
  }

  QQueue(const QQueue&) = delete;
  QQueue& operator=(const QQueue&) = delete;

  void enqueue(Item value) {
    EpochDomain::Guard guard(epochs_);
    Node* elem = nullptr;
    for (;;) {
      SubList& s = sublists_[rng().below(cfg_.width)];
      Node* head = s.head.load();
      Node* tail = s.tail.load();
      Node* next = head->next.load();
      if (head != s.head.load()) continue;
      if (next == nullptr || next->op == QueueOp::Enq) {
        if (elem == nullptr) elem = make_node(QueueOp::Enq, value);
        if (try_append(s, tail, elem)) return;
        continue;
      }
      // Oldest waiting dequeue in this sublist; fulfill it.
      if (head == tail) {
        s.tail.compare_exchange_strong(tail, next);  // help the lagging tail
        continue;
      }
      if (!s.head.compare_exchange_strong(head, next)) continue;
      guard.retire(head);
      if (next->cell->try_fulfill(value, Recorder::now_ns())) {
        if (elem != nullptr) delete elem;
        return;
      }
      // Cancelled ticket: the tombstone is unlinked, the value is still ours.
    }
  }

  Ticket dequeue() {
    EpochDomain::Guard guard(epochs_);
    Node* elem = nullptr;
    for (;;) {
      SubList& s = sublists_[rng().below(cfg_.width)];
      Node* head = s.head.load();
      Node* tail = s.tail.load();
      Node* next = head->next.load();
      if (head != s.head.load()) continue;
      if (next == nullptr || next->op == QueueOp::Deq) {
        if (elem == nullptr) elem = make_node(QueueOp::Deq, 0);
        if (try_append(s, tail, elem)) return Ticket::pending(elem->cell);
        continue;
      }
      if (head == tail) {
        s.tail.compare_exchange_strong(tail, next);
        continue;
      }
      if (!s.head.compare_exchange_strong(head, next)) continue;
      guard.retire(head);
      if (elem != nullptr) delete elem;
      return Ticket::fulfilled(next->value, Recorder::now_ns());
    }
  }

  std::size_t width() const { return cfg_.width; }

  // Single-threaded inspection at quiescence.
  struct Snapshot {
    std::size_t resident_values = 0;
    std::size_t pending_dequeues = 0;  // non-cancelled
    std::size_t cancelled_dequeues = 0;
  };

  Snapshot snapshot() const {
    Snapshot s;
    for (std::size_t i = 0; i < cfg_.width; ++i) {
      for (Node* n = sublists_[i].head.load()->next.load(); n != nullptr;
           n = n->next.load()) {
        if (n->op == QueueOp::Enq)
          ++s.resident_values;
        else if (n->cell->state.load() ==
                 static_cast<std::uint8_t>(TicketState::Cancelled))
          ++s.cancelled_dequeues;
        else
          ++s.pending_dequeues;
      }
    }
    return s;
  }

  // At quiescence each sublist must hold nodes of one kind only.
  std::string check_shape() const {
    for (std::size_t i = 0; i < cfg_.width; ++i) {
      bool saw_enq = false, saw_deq = false;
      for (Node* n = sublists_[i].head.load()->next.load(); n != nullptr;
           n = n->next.load())
        (n->op == QueueOp::Enq ? saw_enq : saw_deq) = true;
      if (saw_enq && saw_deq)
        return "sublist " + std::to_string(i) + " mixes ENQ and DEQ nodes";
    }
    return {};
  }

 private:
  struct Node {
    Item value = 0;
    QueueOp op = QueueOp::Enq;
    std::atomic<Node*> next{nullptr};
    std::shared_ptr<TicketCell> cell;  // dequeue nodes only
  };

  struct alignas(64) SubList {
    std::atomic<Node*> head{nullptr};
    std::atomic<Node*> tail{nullptr};
  };

  XorShift64& rng() { return ThreadRngRegistry::get(id_, cfg_.seed, streams_); }

  static Node* make_node(QueueOp op, Item value) {
    Node* n = new Node;
    n->value = value;
    n->op = op;
    if (op == QueueOp::Deq) n->cell = std::make_shared<TicketCell>();
    return n;
  }

  // One append attempt at the observed tail; helps a lagging tail along.
  bool try_append(SubList& s, Node* tail, Node* elem) {
    Node* tail_next = tail->next.load();
    if (tail != s.tail.load()) return false;
    if (tail_next != nullptr) {
      s.tail.compare_exchange_strong(tail, tail_next);
      return false;
    }
    Node* expected = nullptr;
    if (!tail->next.compare_exchange_strong(expected, elem)) return false;
    s.tail.compare_exchange_strong(tail, elem);
    return true;
  }

  const std::uint64_t id_;
  QQueueConfig cfg_;
  std::unique_ptr<SubList[]> sublists_;
  EpochDomain epochs_;
  std::atomic<std::uint64_t> streams_{0};
};

}  // namespace quant
