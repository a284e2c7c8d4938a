// Independent brute-force references used by the test suites: existence of a
// conservative replay ordering for small histories, a literal dyadic-rational
// evaluation of the verification definition, and quadratic inversion counts.
// These deliberately share no code with the verifier or harness paths they
// cross-check.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quant/history.hpp"

namespace quant::oracle {

// Replay state: live item counts per configuration plus the set of
// configurations that have ever been produced (a read is valid if its value
// once existed, even if the stock has since drained).
struct SimState {
  std::unordered_map<std::size_t, std::int64_t> stock;
  std::unordered_set<std::size_t> produced_ever;
};

// True iff some ordering of the completed calls replays without consuming,
// overwriting, or reading a non-existent item. A writer call contributes its
// producer half (increments new, marks it produced) and consumer half
// (requires stock[prev] >= 1 and decrements), independently schedulable,
// mirroring the floor/ceil split; a writer whose prev equals its new value
// contributes nothing. Search is memoized on the remaining event multiset.
// Guard: throws std::length_error when the history has more than 10
// completed calls.
bool exists_conservative_ordering(const History& h);

// Literal evaluation of the quantifiability definition with exact rational
// arithmetic: reader terms -(1/2)^k accumulated one by one, writer vectors
// split through floor((v+1)/2) / ceil((v-1)/2) evaluated in rationals, and
// the conditional ceiling applied to the exact sum. Guard: n <= 10^4.
bool naive_definition2(const History& h);

// x(j) = |{i<j : a_i > a_j}| + |{i>j : a_i < a_j}|, evaluated in O(n^2).
// Guard: n <= 10^4.
std::vector<std::int64_t> brute_inversions(const std::vector<std::int64_t>& seq);

}  // namespace quant::oracle
