// Shared fixtures and generators for the test suites. Objects are numbered
// x=0, y=1, z=2 throughout.
#pragma once

#include <cstdint>
#include <vector>

#include "quant/history.hpp"
#include "quant/rng.hpp"

namespace quant::testing {

inline MethodCall prod(ThreadId t, ObjectId o, Item in, std::int64_t t0, std::int64_t t1) {
  MethodCall c;
  c.thread = t;
  c.kind = MethodKind::Producer;
  c.object = o;
  c.item_in = in;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

inline MethodCall cons(ThreadId t, ObjectId o, Item out, std::int64_t t0, std::int64_t t1) {
  MethodCall c;
  c.thread = t;
  c.kind = MethodKind::Consumer;
  c.object = o;
  c.item_out = out;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

inline MethodCall cons_pending(ThreadId t, ObjectId o, std::int64_t t0) {
  MethodCall c;
  c.thread = t;
  c.kind = MethodKind::Consumer;
  c.object = o;
  c.invoke_ns = t0;
  return c;
}

inline MethodCall read(ThreadId t, ObjectId o, Item out, std::int64_t t0, std::int64_t t1) {
  MethodCall c;
  c.thread = t;
  c.kind = MethodKind::Reader;
  c.object = o;
  c.item_out = out;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

inline MethodCall writ(ThreadId t, ObjectId o, Item in, Item prev, std::int64_t t0,
                       std::int64_t t1) {
  MethodCall c;
  c.thread = t;
  c.kind = MethodKind::Writer;
  c.object = o;
  c.item_in = in;
  c.prev = prev;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

inline History make(std::vector<MethodCall> calls) {
  for (std::size_t i = 0; i < calls.size(); ++i) calls[i].seq = i;
  return History::from_calls(std::move(calls));
}

// push(P0,x,7) push(P1,x,8) pop(P0,x,7): acceptable.
inline History h1() {
  return make({prod(0, 0, 7, 100, 300), prod(1, 0, 8, 325, 525), cons(0, 0, 7, 550, 750)});
}

// Same timing, but the pop returns 3 out of thin air.
inline History h2() {
  return make({prod(0, 0, 7, 100, 300), prod(1, 0, 8, 325, 525), cons(0, 0, 3, 550, 750)});
}

// Two objects; both projections conserve.
inline History h3() {
  return make({cons(0, 0, 7, 100, 350), prod(0, 1, 8, 375, 600), cons(1, 1, 8, 200, 425),
               prod(1, 0, 7, 450, 675)});
}

// The conditional-pop variant of h3 with the pops taking values.
inline History h4() {
  return make({cons(0, 1, 8, 100, 350), prod(0, 0, 7, 375, 600), cons(1, 0, 7, 200, 425),
               prod(1, 1, 8, 450, 675)});
}

// Three pops race for one pushed item; with conserved semantics one pop
// completes and the other two stay pending.
inline History h5() {
  return make({cons_pending(0, 2, 100), cons(1, 2, 1, 325, 525), cons_pending(0, 2, 550),
               prod(2, 2, 1, 325, 525)});
}

struct RandomHistoryOpts {
  std::size_t n = 100;
  int objects = 2;
  int items = 2;
  bool writers = true;
  bool readers = true;
  std::uint64_t seed = 1;
};

// Arbitrary well-formed completed histories; not biased toward quantifiable.
inline History random_history(const RandomHistoryOpts& o) {
  XorShift64 rng{splitmix64(o.seed)};
  std::vector<MethodCall> calls;
  calls.reserve(o.n);
  std::int64_t t = 0;
  for (std::size_t i = 0; i < o.n; ++i) {
    ObjectId obj = static_cast<ObjectId>(rng.below(o.objects));
    Item a = static_cast<Item>(rng.below(o.items));
    Item b = static_cast<Item>(rng.below(o.items));
    ThreadId th = static_cast<ThreadId>(rng.below(4));
    int kinds = 2 + (o.writers ? 1 : 0) + (o.readers ? 1 : 0);
    std::int64_t t0 = t += 1 + static_cast<std::int64_t>(rng.below(5));
    std::int64_t t1 = t0 + 1 + static_cast<std::int64_t>(rng.below(10));
    switch (rng.below(kinds)) {
      case 0: calls.push_back(prod(th, obj, a, t0, t1)); break;
      case 1: calls.push_back(cons(th, obj, a, t0, t1)); break;
      case 2:
        if (o.writers) {
          calls.push_back(writ(th, obj, a, b, t0, t1));
          break;
        }
        [[fallthrough]];
      default: calls.push_back(read(th, obj, a, t0, t1)); break;
    }
  }
  return make(std::move(calls));
}

inline History random_pc_history(std::size_t n, int objects, int items,
                                 std::uint64_t seed) {
  RandomHistoryOpts o;
  o.n = n;
  o.objects = objects;
  o.items = items;
  o.writers = false;
  o.readers = false;
  o.seed = seed;
  return random_history(o);
}

}  // namespace quant::testing
