#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stack>
#include <thread>
#include <vector>

#include "quant/qstack.hpp"
#include "support/qstack_access.hpp"

using namespace quant;
using TA = QStackTestAccess;

namespace {

QStackConfig cfg(std::size_t width, std::uint64_t seed = 99) {
  QStackConfig c;
  c.width = width;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("sequential width-1 stack is exactly LIFO") {
  QStack s(cfg(1));
  s.push(1);
  s.push(2);
  s.push(3);
  CHECK(*s.pop().poll() == 3);
  CHECK(*s.pop().poll() == 2);
  CHECK(*s.pop().poll() == 1);
  CHECK(s.check_shape().empty());
}

TEST_CASE("width-1 single thread matches a model stack over a long script") {
  QStack s(cfg(1));
  std::stack<Item> model;
  XorShift64 rng{1234};
  for (int i = 0; i < 10000; ++i) {
    if (model.empty() || rng.below(2) == 0) {
      Item v = static_cast<Item>(i) + 1;
      s.push(v);
      model.push(v);
    } else {
      Ticket t = s.pop();
      REQUIRE(t.state() == TicketState::Fulfilled);
      CHECK(*t.poll() == model.top());
      model.pop();
    }
  }
  CHECK(s.check_shape().empty());
}

TEST_CASE("pop on empty stays pending until a push fulfills it") {
  QStack s(cfg(1));
  Ticket t = s.pop();
  CHECK(t.state() == TicketState::Pending);
  CHECK(!t.poll().has_value());
  s.push(9);
  CHECK(t.state() == TicketState::Fulfilled);
  CHECK(*t.poll() == 9);
}

TEST_CASE("push then pop fulfills immediately") {
  QStack s(cfg(1));
  s.push(7);
  Ticket t = s.pop();
  CHECK(t.state() == TicketState::Fulfilled);
  CHECK(*t.poll() == 7);
  CHECK(t.fulfill_ns() > 0);
}

TEST_CASE("two pending pops are both fulfilled by later pushes") {
  QStack s(cfg(2));
  Ticket a = s.pop();
  Ticket b = s.pop();
  CHECK(a.state() == TicketState::Pending);
  CHECK(b.state() == TicketState::Pending);
  s.push(4);
  s.push(5);
  s.quiesce();
  // A push may park under an unlucky index draw; quiesce completes it.
  REQUIRE(a.state() == TicketState::Fulfilled);
  REQUIRE(b.state() == TicketState::Fulfilled);
  std::multiset<Item> got{*a.poll(), *b.poll()};
  CHECK(got == std::multiset<Item>{4, 5});
}

TEST_CASE("cancel transitions exactly once") {
  QStack s(cfg(1));
  Ticket t = s.pop();
  CHECK(t.cancel());
  CHECK(t.state() == TicketState::Cancelled);
  CHECK(!t.cancel());  // second attempt hits a terminal state

  s.push(9);  // must not land in the cancelled ticket
  CHECK(!t.poll().has_value());
  Ticket u = s.pop();
  CHECK(*u.poll() == 9);

  Ticket f = s.pop();  // pending again on the now-empty stack
  s.push(3);
  CHECK(f.state() == TicketState::Fulfilled);
  CHECK(!f.cancel());  // fulfilled tickets cannot be cancelled
}

TEST_CASE("insert over an active descriptor fails without modification") {
  QStack s(cfg(2));
  s.push(1);
  TA::Node* leaf = TA::tail(s, 0);
  std::size_t index = 0;
  if (leaf == nullptr || leaf == TA::sentinel(s)) {
    leaf = TA::tail(s, 1);
    index = 1;
  }
  REQUIRE(leaf != nullptr);
  TA::set_descriptor_active(leaf, true);
  TA::Node* elem = TA::make_node(s, StackOp::Push, 42);
  CHECK(!TA::insert(s, leaf, elem, index));
  CHECK(TA::remove(s, leaf, index) == nullptr);
  TA::set_descriptor_active(leaf, false);
  CHECK(!TA::has_children(leaf));
  TA::free_node(elem);
  auto snap = s.snapshot();
  CHECK(snap.push_nodes == 1);
}

TEST_CASE("a matching fork request becomes a sibling with its own tail") {
  QStack s(cfg(4));
  s.push(1);
  REQUIRE(TA::park(s, StackOp::Push, 42));
  CHECK(s.snapshot().parked_request);
  s.push(2);  // the successful insert adopts the parked node
  auto snap = s.snapshot();
  CHECK(!snap.parked_request);
  CHECK(snap.push_nodes == 3);
  CHECK(snap.tail_slots_used == 2);
  CHECK(s.check_shape().empty());

  std::multiset<Item> drained;
  for (int i = 0; i < 3; ++i) {
    Ticket t = s.pop();
    REQUIRE(t.state() == TicketState::Fulfilled);
    drained.insert(*t.poll());
  }
  CHECK(drained == std::multiset<Item>{1, 2, 42});
  CHECK(s.snapshot().push_nodes == 0);
  CHECK(s.check_shape().empty());
}

TEST_CASE("a mismatched fork request stays parked") {
  QStack s(cfg(4));
  s.push(1);
  REQUIRE(TA::park(s, StackOp::Pop, 0));
  s.push(2);  // insert of a PUSH node must not adopt a POP request
  CHECK(s.snapshot().parked_request);
  s.quiesce();  // completes the parked pop against the pushed values
  CHECK(!s.snapshot().parked_request);
  auto snap = s.snapshot();
  CHECK(snap.push_nodes == 1);  // one value was consumed by the parked pop
  CHECK(s.check_shape().empty());
}

TEST_CASE("draining one side of a fork prunes the branch and frees its tail") {
  QStack s(cfg(4));
  s.push(1);
  REQUIRE(TA::park(s, StackOp::Push, 42));
  s.push(2);
  REQUIRE(s.snapshot().tail_slots_used == 2);

  // Remove the leaf of one branch directly, then poke the stale slot.
  for (std::size_t i = 0; i < 4; ++i) {
    TA::Node* n = TA::tail(s, i);
    if (n != nullptr && n != TA::sentinel(s) && !TA::has_children(n)) {
      REQUIRE(TA::remove(s, n, i) != nullptr);
      break;
    }
  }
  // The freed branch's slot now points at the fork node, which still has one
  // child; the next operation through it releases the slot.
  auto before = s.snapshot();
  CHECK(before.push_nodes == 2);
  while (s.snapshot().tail_slots_used > 1) {
    Ticket t = s.pop();
    REQUIRE(t.state() == TicketState::Fulfilled);
    s.push(*t.poll());
  }
  CHECK(s.check_shape().empty());
}

TEST_CASE("quiesce completes a parked push so its value is poppable") {
  QStack s(cfg(2));
  REQUIRE(TA::park(s, StackOp::Push, 77));
  s.quiesce();
  CHECK(!s.snapshot().parked_request);
  Ticket t = s.pop();
  REQUIRE(t.state() == TicketState::Fulfilled);
  CHECK(*t.poll() == 77);
}

TEST_CASE("concurrent pushes and pops conserve the value multiset") {
  constexpr int kThreads = 4;
  constexpr int kOps = 4000;
  QStack s(cfg(kThreads, 7));
  std::vector<std::vector<Item>> popped(kThreads);
  std::vector<std::vector<Ticket>> pending(kThreads);
  std::atomic<Item> next_value{1};
  std::atomic<std::uint64_t> pushes{0}, pops{0};

  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t)
    threads.emplace_back([&, t] {
      XorShift64 rng{splitmix64(1000 + t)};
      for (int i = 0; i < kOps; ++i) {
        if (rng.below(2) == 0) {
          s.push(next_value.fetch_add(1));
          pushes.fetch_add(1);
        } else {
          Ticket tk = s.pop();
          pops.fetch_add(1);
          if (auto v = tk.poll())
            popped[t].push_back(*v);
          else
            pending[t].push_back(std::move(tk));
        }
      }
    });
  for (auto& th : threads) th.join();
  s.quiesce();
  CHECK(s.check_shape().empty());

  std::multiset<Item> taken;
  std::size_t pending_count = 0;
  for (auto& v : popped)
    for (Item x : v) taken.insert(x);
  for (auto& v : pending)
    for (Ticket& tk : v) {
      if (auto x = tk.poll())
        taken.insert(*x);
      else
        ++pending_count;
    }

  auto snap = s.snapshot();
  std::multiset<Item> produced;
  for (Item v = 1; v < next_value.load(); ++v) produced.insert(v);
  std::multiset<Item> accounted = taken;
  for (Item v : snap.push_values) accounted.insert(v);
  CHECK(accounted == produced);  // no loss, no duplication

  std::uint64_t np = pushes.load(), nc = pops.load();
  std::uint64_t expect_pending = nc > np ? nc - np : 0;
  CHECK(pending_count == snap.pop_nodes);
  CHECK(pending_count == expect_pending);
}

TEST_CASE("progress under scheduler noise") {
  QStack s(cfg(2, 31));
  std::atomic<bool> done{false};
  std::thread noise([&] {
    while (!done.load()) std::this_thread::yield();
  });
  std::vector<std::thread> workers;
  std::atomic<std::uint64_t> completed{0};
  for (int t = 0; t < 3; ++t)
    workers.emplace_back([&, t] {
      for (int i = 0; i < 2000; ++i) {
        if ((i + t) % 2 == 0)
          s.push(i);
        else
          s.pop();
        completed.fetch_add(1);
      }
    });
  for (auto& th : workers) th.join();
  done.store(true);
  noise.join();
  CHECK(completed.load() == 3 * 2000);
}

TEST_CASE("cancelled pending pops are skipped by later pushes under stress") {
  QStack s(cfg(2, 5));
  std::vector<Ticket> tickets;
  for (int i = 0; i < 50; ++i) tickets.push_back(s.pop());
  for (int i = 0; i < 50; i += 2) CHECK(tickets[i].cancel());
  for (int i = 0; i < 25; ++i) s.push(100 + i);
  s.quiesce();
  for (int r = 0; r < 10 && s.snapshot().pop_nodes > 0; ++r) s.quiesce();

  std::multiset<Item> got;
  for (int i = 1; i < 50; i += 2) {
    auto v = tickets[i].wait();
    REQUIRE(v.has_value());
    got.insert(*v);
  }
  std::multiset<Item> want;
  for (int i = 0; i < 25; ++i) want.insert(100 + i);
  CHECK(got == want);
  for (int i = 0; i < 50; i += 2) CHECK(!tickets[i].poll().has_value());
}
