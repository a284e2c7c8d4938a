// White-box access to QStack internals for structural tests.
#pragma once

#include "quant/qstack.hpp"

namespace quant {

struct QStackTestAccess {
  using Node = QStack::Node;

  static Node* make_node(QStack& s, StackOp op, Item v) { return s.make_node(op, v); }

  static void free_node(Node* n) { QStack::delete_unlinked(n); }

  static Node* tail(QStack& s, std::size_t index) { return s.load_tail(index); }

  static Node* sentinel(QStack& s) { return s.sentinel_; }

  static bool insert(QStack& s, Node* cur, Node* elem, std::size_t index) {
    EpochDomain::Guard guard(s.epochs_);
    return s.insert(cur, elem, index, guard);
  }

  static Node* remove(QStack& s, Node* cur, std::size_t index) {
    EpochDomain::Guard guard(s.epochs_);
    return s.remove(cur, index, guard);
  }

  static void set_descriptor_active(Node* n, bool active) {
    n->desc.load()->active.store(active);
  }

  static bool park(QStack& s, StackOp op, Item v) {
    Node* n = s.make_node(op, v);
    Node* expected = nullptr;
    if (s.fork_request_.compare_exchange_strong(expected, n)) return true;
    QStack::delete_unlinked(n);
    return false;
  }

  static bool has_children(const Node* n) { return QStack::has_children(n); }

  static Item value(const Node* n) { return n->value; }
};

}  // namespace quant
