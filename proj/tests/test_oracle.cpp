#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quant/oracle.hpp"
#include "quant/verifier.hpp"
#include "support/builders.hpp"

using namespace quant;
namespace qt = quant::testing;

TEST_CASE("h1 has a conservative ordering, h2 does not") {
  CHECK(oracle::exists_conservative_ordering(qt::h1()));
  CHECK(!oracle::exists_conservative_ordering(qt::h2()));
}

TEST_CASE("ordering search enforces its size guard") {
  std::vector<MethodCall> calls;
  for (int i = 0; i < 11; ++i) calls.push_back(qt::prod(0, 0, i, 2 * i, 2 * i + 1));
  CHECK_THROWS_AS(oracle::exists_conservative_ordering(qt::make(std::move(calls))),
                  std::length_error);
}

TEST_CASE("all kind combinations of four calls agree with verify") {
  // 4^4 kind patterns over one object, items {0,1}, payloads cycling through
  // a fixed pattern per position.
  int checked = 0;
  for (int mask = 0; mask < 256; ++mask) {
    std::vector<MethodCall> calls;
    for (int pos = 0; pos < 4; ++pos) {
      int kind = (mask >> (2 * pos)) & 3;
      Item a = pos % 2;
      Item b = (pos + 1) % 2;
      std::int64_t t0 = 10 * pos, t1 = 10 * pos + 5;
      switch (kind) {
        case 0: calls.push_back(qt::prod(0, 0, a, t0, t1)); break;
        case 1: calls.push_back(qt::cons(0, 0, a, t0, t1)); break;
        case 2: calls.push_back(qt::read(0, 0, a, t0, t1)); break;
        case 3: calls.push_back(qt::writ(0, 0, a, b, t0, t1)); break;
      }
    }
    History h = qt::make(std::move(calls));
    CHECK(oracle::exists_conservative_ordering(h) == verify(h).quantifiable);
    ++checked;
  }
  CHECK(checked == 256);
}

TEST_CASE("writer cycles order through their split halves") {
  // Neither writer can precede the other atomically, yet the net effect
  // conserves every configuration.
  History cycle = qt::make({qt::writ(0, 0, 8, 7, 1, 2), qt::writ(1, 0, 7, 8, 3, 4)});
  CHECK(verify(cycle).quantifiable);
  CHECK(oracle::exists_conservative_ordering(cycle));

  History self = qt::make({qt::writ(0, 0, 7, 7, 1, 2)});
  CHECK(verify(self).quantifiable);
  CHECK(oracle::exists_conservative_ordering(self));

  // A self-write does not make the value readable.
  History self_read = qt::make({qt::writ(0, 0, 7, 7, 1, 2), qt::read(0, 0, 7, 3, 4)});
  CHECK(!verify(self_read).quantifiable);
  CHECK(!oracle::exists_conservative_ordering(self_read));
}

TEST_CASE("naive definition evaluation on the fixtures") {
  CHECK(oracle::naive_definition2(qt::h1()));
  CHECK(!oracle::naive_definition2(qt::h2()));
  CHECK(oracle::naive_definition2(qt::h3()));
  CHECK(oracle::naive_definition2(qt::h4()));
  CHECK(oracle::naive_definition2(qt::h5()));
}

TEST_CASE("a single reader with no producer fails by direct evaluation") {
  CHECK(!oracle::naive_definition2(qt::make({qt::read(0, 0, 9, 1, 2)})));
}

TEST_CASE("naive evaluation agrees with verify on random histories") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    History h = qt::random_history({.n = 40, .objects = 2, .items = 2, .seed = seed});
    CHECK(oracle::naive_definition2(h) == verify(h).quantifiable);
  }
}

TEST_CASE("ordering search agrees with verify on an exhaustive small sweep") {
  // Reduced sweep (n <= 4) for unit-test speed; the acceptance suite runs
  // the full n <= 6 domain.
  std::vector<MethodCall> domain;
  for (ObjectId o = 0; o < 2; ++o)
    for (Item a = 0; a < 2; ++a) {
      domain.push_back(qt::prod(0, o, a, 0, 1));
      domain.push_back(qt::cons(0, o, a, 0, 1));
      domain.push_back(qt::read(0, o, a, 0, 1));
      for (Item b = 0; b < 2; ++b) domain.push_back(qt::writ(0, o, a, b, 0, 1));
    }
  REQUIRE(domain.size() == 20);

  std::uint64_t instances = 0;
  // Multisets as non-decreasing index tuples.
  std::vector<std::size_t> pick;
  auto run = [&](auto&& self, std::size_t start, int depth) -> void {
    if (depth > 0) {
      std::vector<MethodCall> calls;
      std::int64_t t = 0;
      for (std::size_t idx : pick) {
        MethodCall c = domain[idx];
        c.invoke_ns = t;
        c.response_ns = t + 1;
        t += 2;
        calls.push_back(c);
      }
      History h = qt::make(std::move(calls));
      CHECK(oracle::exists_conservative_ordering(h) == verify(h).quantifiable);
      ++instances;
    }
    if (depth == 4) return;
    for (std::size_t i = start; i < domain.size(); ++i) {
      pick.push_back(i);
      self(self, i, depth + 1);
      pick.pop_back();
    }
  };
  run(run, 0, 0);
  CHECK(instances > 10000);
}

TEST_CASE("brute inversion counts on the worked sequences") {
  CHECK(oracle::brute_inversions({1, 2, 3}) == std::vector<std::int64_t>{0, 0, 0});
  CHECK(oracle::brute_inversions({2, 1, 3}) == std::vector<std::int64_t>{1, 1, 0});
  CHECK(oracle::brute_inversions({3, 2, 1}) == std::vector<std::int64_t>{2, 2, 2});
  CHECK(oracle::brute_inversions({}) == std::vector<std::int64_t>{});
}

TEST_CASE("naive evaluation size guard") {
  std::vector<MethodCall> calls;
  for (int i = 0; i < 10001; ++i) calls.push_back(qt::prod(0, 0, i % 7, 2 * i, 2 * i + 1));
  CHECK_THROWS_AS(oracle::naive_definition2(qt::make(std::move(calls))),
                  std::length_error);
}
