// History verification: per-kind value assignment, the writer floor/ceil
// split, and the per-configuration non-negativity check over the summed
// accumulators. Exact integer arithmetic throughout; the reader geometric
// series -(1 - 2^-k) lies in (-1, 0] and is carried as the read count k.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "quant/history.hpp"

namespace quant {

// Accumulator vectors over the basis. p, w_prod, read_count are >= 0
// elementwise; w_cons and c_sum are <= 0 elementwise. The exact reader sum
// at index i equals -(1 - 2^-read_count[i]).
struct KindSums {
  std::vector<std::int64_t> p;
  std::vector<std::int64_t> w_prod;
  std::vector<std::int64_t> w_cons;
  std::vector<std::int64_t> c_sum;
  std::vector<std::int64_t> read_count;
  std::size_t c = 0;  // configuration count
};

enum class ViolationReason : std::uint8_t { OverConsume, OverWrite, ReadUnproduced };

const char* reason_name(ViolationReason r);

struct Violation {
  Config config;
  ViolationReason reason;
  bool operator==(const Violation&) const = default;
};

struct Verdict {
  bool quantifiable = true;
  std::vector<std::int64_t> h_floor;  // floor of the evaluated history vector
  std::vector<Violation> violations;  // ordered by configuration index
  std::size_t pending_calls = 0;      // excluded from the sums, reported here
};

// Sums completed calls only. Throws std::invalid_argument on calls breaking
// the per-kind payload rules (e.g. a completed writer without prev).
KindSums assign_values(const History& h);

// Elementwise split of one writer vector (entries in {-1,0,1}) into its
// producer effect floor((v+1)/2) and consumer effect ceil((v-1)/2).
// Throws std::domain_error on entries outside {-1,0,1}.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> split_writer(
    const std::vector<std::int64_t>& v);

// Definition check in O(n + c). For each configuration i:
//   if p[i]+w_prod[i] >= 1:  H[i] = ceil(p+w_prod+R) + w_cons + c_sum, and the
//     ceiling of an integer plus R in (-1,0] is that integer, so
//     H[i] = p[i]+w_prod[i]+w_cons[i]+c_sum[i] exactly;
//   else p[i]+w_prod[i] == 0 and H[i] = w_cons[i]+c_sum[i]+R[i], which is
//     negative whenever any term is (read_count > 0 makes R < 0).
// Quantifiable iff every H[i] >= 0.
Verdict verify(const History& h);

// Verdict of the subhistory H|object; empty subhistory is quantifiable.
Verdict verify_projection(const History& h, ObjectId object);

}  // namespace quant
