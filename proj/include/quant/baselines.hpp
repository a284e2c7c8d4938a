// Comparison baselines with conditional consumer semantics: a Treiber-style
// stack and a classic two-CAS linked queue. Consumers return nullopt on an
// empty structure instead of waiting, which is exactly the behaviour the
// conserving structures exist to avoid.
#pragma once

#include <atomic>
#include <optional>

#include "quant/epoch.hpp"
#include "quant/history.hpp"

namespace quant {

class TreiberStack {
 public:
  TreiberStack() = default;
  ~TreiberStack() {
    Node* n = top_.load();
    while (n != nullptr) {
      Node* next = n->next;
      delete n;
      n = next;
    }
  }
  TreiberStack(const TreiberStack&) = delete;
  TreiberStack& operator=(const TreiberStack&) = delete;

  void push(Item value) {
    Node* n = new Node{value, top_.load()};
    while (!top_.compare_exchange_weak(n->next, n)) {
    }
  }

  std::optional<Item> pop() {
    EpochDomain::Guard guard(epochs_);
    for (;;) {
      Node* n = top_.load();
      if (n == nullptr) return std::nullopt;
      if (top_.compare_exchange_weak(n, n->next)) {
        Item v = n->value;
        guard.retire(n);
        return v;
      }
    }
  }

 private:
  struct Node {
    Item value;
    Node* next;
  };
  std::atomic<Node*> top_{nullptr};
  EpochDomain epochs_;
};

class BaselineQueue {
 public:
  BaselineQueue() {
    Node* sentinel = new Node;
    head_.store(sentinel);
    tail_.store(sentinel);
  }
  ~BaselineQueue() {
    Node* n = head_.load();
    while (n != nullptr) {
      Node* next = n->next.load();
      delete n;
      n = next;
    }
  }
  BaselineQueue(const BaselineQueue&) = delete;
  BaselineQueue& operator=(const BaselineQueue&) = delete;

  void enqueue(Item value) {
    Node* elem = new Node{value};
    EpochDomain::Guard guard(epochs_);
    for (;;) {
      Node* tail = tail_.load();
      Node* next = tail->next.load();
      if (tail != tail_.load()) continue;
      if (next != nullptr) {
        tail_.compare_exchange_strong(tail, next);
        continue;
      }
      Node* expected = nullptr;
      if (tail->next.compare_exchange_strong(expected, elem)) {
        tail_.compare_exchange_strong(tail, elem);
        return;
      }
    }
  }

  std::optional<Item> dequeue() {
    EpochDomain::Guard guard(epochs_);
    for (;;) {
      Node* head = head_.load();
      Node* tail = tail_.load();
      Node* next = head->next.load();
      if (head != head_.load()) continue;
      if (head == tail) {
        if (next == nullptr) return std::nullopt;
        tail_.compare_exchange_strong(tail, next);
        continue;
      }
      Item v = next->value;
      if (head_.compare_exchange_strong(head, next)) {
        guard.retire(head);
        return v;
      }
    }
  }

 private:
  struct Node {
    Item value = 0;
    std::atomic<Node*> next{nullptr};
  };
  std::atomic<Node*> head_{nullptr};
  std::atomic<Node*> tail_{nullptr};
  EpochDomain epochs_;
};

}  // namespace quant
