// Conserving lock-free stack. The structure is a doubly-linked tree of nodes
// hanging off a sentinel root, with up to `width` tail slots referencing its
// leaves. Push inserts a PUSH node at a leaf or removes a waiting POP leaf
// and fulfills its ticket; pop removes a PUSH leaf or inserts a POP node and
// returns a pending ticket. No operation ever reports emptiness.
//
// Per-node descriptors installed by compare-and-exchange give an operation
// exclusive ownership of one node; the descriptor deactivation is the
// operation's visibility point. An operation failing fail_threshold attempts
// parks its node in the single forkRequest slot; a succeeding insert of the
// same kind adopts it as a sibling, widening the tree with a new tail.
#pragma once

#include <array>
#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "quant/epoch.hpp"
#include "quant/history.hpp"
#include "quant/rng.hpp"
#include "quant/ticket.hpp"

namespace quant {

enum class StackOp : std::uint8_t { Push, Pop };

struct QStackConfig {
  std::size_t width = 0;    // 0: use hardware concurrency
  int fail_threshold = 8;   // failed attempts before publishing a fork request
  std::uint64_t seed = 0x715EC0DE;
};

class QStack {
 public:
  explicit QStack(QStackConfig cfg = {})
      : id_(ThreadRngRegistry::next_instance_id()), cfg_(cfg) {
    if (cfg_.width == 0) {
      unsigned hw = std::thread::hardware_concurrency();
      cfg_.width = hw ? hw : 1;
    }
    assert(cfg_.width >= 1 && cfg_.fail_threshold >= 1);
    sentinel_ = new Node;
    sentinel_->is_sentinel = true;
    sentinel_->desc.store(new Desc{0, StackOp::Push, {false}});
    tails_.resize(cfg_.width);
    for (auto& t : tails_) t = std::make_unique<std::atomic<Node*>>(nullptr);
    tails_[0]->store(sentinel_);
  }

  ~QStack() {
    if (Node* parked = fork_request_.exchange(nullptr)) free_subtree(parked);
    free_subtree(sentinel_);
  }

  QStack(const QStack&) = delete;
  QStack& operator=(const QStack&) = delete;

  void push(Item value) { run_op(StackOp::Push, value, nullptr, true); }

  Ticket pop() { return run_op(StackOp::Pop, 0, nullptr, true); }

  // Completes a parked fork-request operation. Call only while no other
  // thread is operating (same precondition as Recorder::merge); a parked
  // node is an operation whose visibility point has not happened yet.
  void quiesce() {
    while (Node* parked = fork_request_.exchange(nullptr))
      run_op(parked->op, parked->value, parked, false);
  }

  std::size_t width() const { return cfg_.width; }

  // Single-threaded inspection for tests and the harness.
  struct Snapshot {
    std::size_t push_nodes = 0;
    std::size_t pop_nodes = 0;  // pending, non-cancelled
    std::size_t cancelled_pops = 0;
    std::size_t tail_slots_used = 0;
    bool parked_request = false;
    std::vector<Item> push_values;
  };

  Snapshot snapshot() const {
    Snapshot s;
    collect(sentinel_, s);
    for (const auto& t : tails_) {
      Node* n = t->load();
      if (n != nullptr && n != reserved_marker()) ++s.tail_slots_used;
    }
    s.parked_request = fork_request_.load() != nullptr;
    return s;
  }

  // Structural invariants, checked at quiescence. Empty string when sound:
  // child->prev links match, every tail slot points into the tree, every
  // true leaf holds one or two tail references, interior nodes have no
  // duplicate children.
  std::string check_shape() const {
    std::unordered_set<const Node*> in_tree;
    std::string err;
    walk_check(sentinel_, in_tree, err);
    if (!err.empty()) return err;
    for (const auto& t : tails_) {
      const Node* n = t->load();
      if (n == nullptr || n == reserved_marker()) continue;
      if (!in_tree.count(n)) return "tail slot references a node outside the tree";
    }
    for (const Node* n : in_tree) {
      if (has_children(n)) continue;
      std::size_t refs = tail_refs(n);
      if (refs < 1 || refs > 2)
        return "leaf with " + std::to_string(refs) + " tail references";
    }
    return {};
  }

 private:
  friend struct QStackTestAccess;

  struct Desc {
    Item value;
    StackOp op;
    std::atomic<bool> active{true};
  };

  struct Node {
    Item value = 0;
    StackOp op = StackOp::Push;
    bool is_sentinel = false;
    std::atomic<Desc*> desc{nullptr};
    Node* prev = nullptr;
    std::array<std::atomic<Node*>, 2> nexts{nullptr, nullptr};
    std::shared_ptr<TicketCell> cell;  // pop nodes only
  };

  static Node* reserved_marker() {
    static Node marker;
    return &marker;
  }

  XorShift64& rng() { return ThreadRngRegistry::get(id_, cfg_.seed, streams_); }

  Node* load_tail(std::size_t index) {
    Node* n = tails_[index]->load();
    return n == reserved_marker() ? nullptr : n;
  }

  // Shared push/pop loop. `preset` carries a parked node being completed by
  // quiesce(); allow_park is false there so completion cannot re-park.
  Ticket run_op(StackOp op, Item value, Node* preset, bool allow_park) {
    Node* elem = preset;
    if (preset != nullptr) {
      op = preset->op;
      value = preset->value;
    }
    int failures = 0;
    EpochDomain::Guard guard(epochs_);
    for (;;) {
      std::size_t index = rng().below(cfg_.width);
      Node* cur = load_tail(index);
      if (cur == nullptr) continue;

      if (!cur->is_sentinel && cur->op != op) {
        // Opposite kind at this leaf: remove it. A push fulfills the waiting
        // pop; a pop takes the pushed value.
        Node* removed = remove(cur, index, guard);
        if (removed != nullptr) {
          std::int64_t now = Recorder::now_ns();
          if (op == StackOp::Push) {
            if (!removed->cell->try_fulfill(value, now))
              continue;  // cancelled ticket: tombstone unlinked, value still ours
            if (elem != nullptr) delete_unlinked(elem);
            return Ticket{};
          }
          Item got = removed->value;
          if (preset != nullptr) {
            preset->cell->try_fulfill(got, now);
            delete_unlinked(preset);
            return Ticket{};
          }
          if (elem != nullptr) delete_unlinked(elem);
          return Ticket::fulfilled(got, now);
        }
        ++failures;
      } else {
        if (elem == nullptr) elem = make_node(op, value);
        if (insert(cur, elem, index, guard))
          return op == StackOp::Pop && preset == nullptr
                     ? Ticket::pending(elem->cell)
                     : Ticket{};
        ++failures;
      }

      if (allow_park && failures > cfg_.fail_threshold &&
          fork_request_.load() == nullptr) {
        if (elem == nullptr) elem = make_node(op, value);
        Node* expected = nullptr;
        if (fork_request_.compare_exchange_strong(expected, elem))
          return op == StackOp::Pop ? Ticket::pending(elem->cell) : Ticket{};
      }
      if (failures > 0 && failures % 4 == 0) std::this_thread::yield();
    }
  }

  Node* make_node(StackOp op, Item value) {
    Node* n = new Node;
    n->value = value;
    n->op = op;
    n->desc.store(new Desc{value, op, {false}});
    if (op == StackOp::Pop) n->cell = std::make_shared<TicketCell>();
    return n;
  }

  static void delete_unlinked(Node* n) {
    delete n->desc.load();
    delete n;
  }

  // Descriptor installation; non-null on ownership. The replaced descriptor
  // is retired, not freed: a concurrent op may still be reading it.
  Desc* acquire(Node* cur, Item value, StackOp op, EpochDomain::Guard& guard) {
    Desc* cur_desc = cur->desc.load();
    if (cur_desc->active.load()) return nullptr;
    Desc* d = new Desc{value, op, {true}};
    if (!cur->desc.compare_exchange_strong(cur_desc, d)) {
      delete d;
      return nullptr;
    }
    guard.retire(cur_desc);
    return d;
  }

  std::size_t tail_refs(const Node* cur) const {
    std::size_t refs = 0;
    for (const auto& t : tails_)
      if (t->load() == cur) ++refs;
    return refs;
  }

  static bool has_children(const Node* n) {
    return n->nexts[0].load() != nullptr || n->nexts[1].load() != nullptr;
  }

  // Child-list writes happen only while holding the parent's descriptor
  // (adds, parent is a leaf) or the child's (removal), which cannot overlap
  // for one slot; plain atomic stores suffice.
  static void add_child(Node* parent, Node* child) {
    child->prev = parent;
    if (parent->nexts[0].load() == nullptr)
      parent->nexts[0].store(child);
    else
      parent->nexts[1].store(child);
  }

  static void drop_child(Node* parent, Node* child) {
    if (parent->nexts[0].load() == child)
      parent->nexts[0].store(nullptr);
    else
      parent->nexts[1].store(nullptr);
  }

  bool insert(Node* cur, Node* elem, std::size_t index, EpochDomain::Guard& guard) {
    Desc* d = acquire(cur, elem->value, elem->op, guard);
    if (d == nullptr) return false;
    if (tails_[index]->load() != cur) {
      d->active.store(false);
      return false;
    }
    if (has_children(cur) || tail_refs(cur) != 1) {
      // Dead branch: a drained fork left this slot on a non-leaf or a
      // duplicate reference. Release the slot; surviving leaves keep theirs.
      tails_[index]->store(nullptr);
      d->active.store(false);
      return false;
    }
    add_child(cur, elem);
    tails_[index]->store(elem);
    adopt_fork_request(cur, elem);
    d->active.store(false);  // visibility point
    return true;
  }

  // Unlinks leaf cur. Returns it on success; the node is retired but stays
  // readable under the caller's guard.
  Node* remove(Node* cur, std::size_t index, EpochDomain::Guard& guard) {
    assert(!cur->is_sentinel);
    Desc* d = acquire(cur, cur->value, cur->op, guard);
    if (d == nullptr) return nullptr;
    if (tails_[index]->load() != cur) {
      d->active.store(false);
      return nullptr;
    }
    if (has_children(cur) || tail_refs(cur) != 1) {
      tails_[index]->store(nullptr);
      d->active.store(false);
      return nullptr;
    }
    Node* prev = cur->prev;
    drop_child(prev, cur);
    tails_[index]->store(prev);
    d->active.store(false);  // visibility point
    guard.retire(cur);
    return cur;
  }

  // Adopt a parked node as elem's sibling when kinds match and a tail slot
  // is free. A request that cannot be adopted stays parked for a later
  // insert; dropping it would lose a conserved call.
  void adopt_fork_request(Node* cur, Node* elem) {
    Node* helper = fork_request_.load();
    if (helper == nullptr || helper->op != elem->op) return;
    std::size_t slot = cfg_.width;
    for (std::size_t i = 0; i < cfg_.width; ++i) {
      Node* expected = nullptr;
      if (tails_[i]->load() == nullptr &&
          tails_[i]->compare_exchange_strong(expected, reserved_marker())) {
        slot = i;
        break;
      }
    }
    if (slot == cfg_.width) return;
    if (!fork_request_.compare_exchange_strong(helper, nullptr)) {
      tails_[slot]->store(nullptr);
      return;
    }
    add_child(cur, helper);
    tails_[slot]->store(helper);
  }

  void collect(const Node* n, Snapshot& s) const {
    if (!n->is_sentinel) {
      if (n->op == StackOp::Push) {
        ++s.push_nodes;
        s.push_values.push_back(n->value);
      } else if (n->cell->state.load() ==
                 static_cast<std::uint8_t>(TicketState::Cancelled)) {
        ++s.cancelled_pops;
      } else {
        ++s.pop_nodes;
      }
    }
    for (const auto& next : n->nexts)
      if (const Node* c = next.load()) collect(c, s);
  }

  void walk_check(const Node* n, std::unordered_set<const Node*>& in_tree,
                  std::string& err) const {
    if (!err.empty()) return;
    if (!in_tree.insert(n).second) {
      err = "node reachable twice";
      return;
    }
    const Node* a = n->nexts[0].load();
    const Node* b = n->nexts[1].load();
    if (a != nullptr && a == b) {
      err = "duplicate child link";
      return;
    }
    for (const Node* c : {a, b}) {
      if (c == nullptr) continue;
      if (c->prev != n) {
        err = "child prev link does not match parent";
        return;
      }
      walk_check(c, in_tree, err);
    }
  }

  void free_subtree(Node* n) {
    for (auto& next : n->nexts)
      if (Node* c = next.load()) free_subtree(c);
    delete_unlinked(n);
  }

  const std::uint64_t id_;
  QStackConfig cfg_;
  Node* sentinel_;
  std::vector<std::unique_ptr<std::atomic<Node*>>> tails_;
  std::atomic<Node*> fork_request_{nullptr};
  EpochDomain epochs_;
  std::atomic<std::uint64_t> streams_{0};
};

}  // namespace quant
