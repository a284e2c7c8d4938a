// Workload generation, multithreaded benchmarking with history recording,
// and the entropy pipeline: per-item inversion counts, their distribution,
// and Shannon entropy in bits.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quant/history.hpp"

namespace quant {

enum class StructureKind : std::uint8_t { QStack, QQueue, Treiber, BaseQueue };
enum class Mix : std::uint8_t { P25, P50, P75, Pairwise };
enum class Discipline : std::uint8_t { Lifo, Fifo };

const char* structure_name(StructureKind s);
const char* mix_name(Mix m);
std::optional<StructureKind> structure_from_name(const std::string& name);
std::optional<Mix> mix_from_name(const std::string& name);

struct WorkloadSpec {
  StructureKind structure = StructureKind::QStack;
  unsigned threads = 1;
  std::uint64_t ops_per_thread = 0;
  Mix mix = Mix::P50;
  std::uint64_t seed = 1;
  std::uint64_t prefill = 0;
  std::size_t width = 0;   // 0: structure default
  int fail_threshold = 8;
};

struct BenchReport {
  WorkloadSpec spec;                    // width resolved to its effective value
  std::uint64_t completed_calls = 0;    // all recorded calls incl. prefill/drain
  std::int64_t wall_ns = 0;
  double throughput_ops_per_us = 0.0;
  std::vector<std::uint64_t> per_thread_ops;
  std::uint64_t pending_before_drain = 0;
  std::uint64_t drain_producers = 0;
};

// CSV row format: structure,threads,ops_per_thread,mix,seed,width,
// throughput_ops_per_us,wall_ns
std::string bench_csv_header();
std::string bench_csv_row(const BenchReport& r);

struct BenchResult {
  BenchReport report;
  History history;
};

// Spawns `threads` workers, each issuing ops_per_thread calls drawn from the
// mix (seeded per thread). Producer payloads come from a global counter, so
// every produced value is distinct and doubles as the arrival rank. Pending
// consumer tickets are drained by a final producer phase; the returned
// history is quiescent and fully resolved.
BenchResult run_bench(const WorkloadSpec& spec);

// Fill-then-drain workload: `threads` workers push items_per_thread values
// each, then (after a quiescent barrier) workers pop exactly that many. The
// calibration case for LIFO inversion counting.
struct FillDrainSpec {
  StructureKind structure = StructureKind::QStack;
  unsigned threads = 1;
  std::uint64_t items_per_thread = 0;
  std::uint64_t seed = 1;
  std::size_t width = 0;
  int fail_threshold = 8;
};

BenchResult run_fill_drain(const FillDrainSpec& spec);

// Per-element inversion counts x(j) = |{i<j : a_i > a_j}| + |{i>j : a_i < a_j}|
// via an order-statistics merge sort, O(n log n). Elements must be distinct.
std::vector<std::int64_t> inversions(const std::vector<std::int64_t>& ranks);

struct InversionStats {
  std::vector<std::int64_t> counts;  // echo of the input
  std::vector<std::pair<std::int64_t, std::uint64_t>> distribution;  // count -> freq
  double entropy_bits = 0.0;
};

// P(X) = freq/n over observed inversion values; H(X) = -sum P log2 P.
// Throws std::domain_error on empty input.
InversionStats entropy(const std::vector<std::int64_t>& counts);

// CSV rows `inversion_count,frequency,probability` plus a trailing comment
// line `# entropy_bits=<value>`.
std::string inversion_csv(const InversionStats& stats);

// Ranks items by producer completion order (response time, ties by seq) and
// returns the consumer-completion sequence of those ranks, normalized so a
// perfectly sequential run yields zero inversions: FIFO keeps ranks as-is,
// LIFO negates them (the ideal drain of a fill-then-drain run is perfect
// reversal). Throws std::invalid_argument when the history is not usable as
// an instrumented run: duplicate produced (object,item) configurations or a
// consumed value with no matching producer.
std::vector<std::int64_t> rank_and_order(const History& h, Discipline d);

}  // namespace quant
