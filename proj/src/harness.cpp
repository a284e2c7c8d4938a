#include "quant/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "quant/baselines.hpp"
#include "quant/qqueue.hpp"
#include "quant/qstack.hpp"
#include "quant/rng.hpp"
#include "quant/ticket.hpp"

namespace quant {

const char* structure_name(StructureKind s) {
  switch (s) {
    case StructureKind::QStack: return "qstack";
    case StructureKind::QQueue: return "qqueue";
    case StructureKind::Treiber: return "treiber";
    case StructureKind::BaseQueue: return "baseq";
  }
  return "?";
}

const char* mix_name(Mix m) {
  switch (m) {
    case Mix::P25: return "25";
    case Mix::P50: return "50";
    case Mix::P75: return "75";
    case Mix::Pairwise: return "pairwise";
  }
  return "?";
}

std::optional<StructureKind> structure_from_name(const std::string& name) {
  if (name == "qstack") return StructureKind::QStack;
  if (name == "qqueue") return StructureKind::QQueue;
  if (name == "treiber") return StructureKind::Treiber;
  if (name == "baseq") return StructureKind::BaseQueue;
  return std::nullopt;
}

std::optional<Mix> mix_from_name(const std::string& name) {
  if (name == "25") return Mix::P25;
  if (name == "50") return Mix::P50;
  if (name == "75") return Mix::P75;
  if (name == "pairwise" || name == "PAIRWISE" || name == "50pw" || name == "50PW")
    return Mix::Pairwise;
  return std::nullopt;
}

std::string bench_csv_header() {
  return "structure,threads,ops_per_thread,mix,seed,width,throughput_ops_per_us,wall_ns";
}

std::string bench_csv_row(const BenchReport& r) {
  std::ostringstream out;
  out << structure_name(r.spec.structure) << ',' << r.spec.threads << ','
      << r.spec.ops_per_thread << ',' << mix_name(r.spec.mix) << ',' << r.spec.seed
      << ',' << r.spec.width << ',' << std::fixed << std::setprecision(6)
      << r.throughput_ops_per_us << ',' << r.wall_ns;
  return out.str();
}

namespace {

constexpr ObjectId kBenchObject = 0;

MethodCall producer_call(ThreadId thread, Item v, std::int64_t t0, std::int64_t t1) {
  MethodCall c;
  c.thread = thread;
  c.kind = MethodKind::Producer;
  c.object = kBenchObject;
  c.item_in = v;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

MethodCall consumer_call(ThreadId thread, Item v, std::int64_t t0, std::int64_t t1) {
  MethodCall c;
  c.thread = thread;
  c.kind = MethodKind::Consumer;
  c.object = kBenchObject;
  c.item_out = v;
  c.invoke_ns = t0;
  c.response_ns = t1;
  return c;
}

struct PendingConsumer {
  Ticket ticket;
  ThreadId thread;
  std::int64_t invoke_ns;
};

// One bench-facing surface over the four structures.
struct QStackAdapter {
  static constexpr bool kConserving = true;
  QStack s;
  explicit QStackAdapter(const WorkloadSpec& w)
      : s(QStackConfig{w.width, w.fail_threshold, w.seed}) {}
  std::size_t width() const { return s.width(); }
  void produce(Item v) { s.push(v); }
  Ticket consume() { return s.pop(); }
  void quiesce() { s.quiesce(); }
};

struct QQueueAdapter {
  static constexpr bool kConserving = true;
  QQueue q;
  explicit QQueueAdapter(const WorkloadSpec& w) : q(QQueueConfig{w.width, w.seed}) {}
  std::size_t width() const { return q.width(); }
  void produce(Item v) { q.enqueue(v); }
  Ticket consume() { return q.dequeue(); }
  void quiesce() {}
};

struct TreiberAdapter {
  static constexpr bool kConserving = false;
  TreiberStack s;
  explicit TreiberAdapter(const WorkloadSpec&) {}
  std::size_t width() const { return 1; }
  void produce(Item v) { s.push(v); }
  std::optional<Item> consume_opt() { return s.pop(); }
  void quiesce() {}
};

struct BaseQueueAdapter {
  static constexpr bool kConserving = false;
  BaselineQueue q;
  explicit BaseQueueAdapter(const WorkloadSpec&) {}
  std::size_t width() const { return 1; }
  void produce(Item v) { q.enqueue(v); }
  std::optional<Item> consume_opt() { return q.dequeue(); }
  void quiesce() {}
};

bool draw_producer(Mix mix, XorShift64& rng, std::uint64_t op_index) {
  switch (mix) {
    case Mix::P25: return rng.next() % 100 < 25;
    case Mix::P50: return rng.next() % 100 < 50;
    case Mix::P75: return rng.next() % 100 < 75;
    case Mix::Pairwise: return op_index % 2 == 0;
  }
  return true;
}

template <class Adapter>
BenchResult run_bench_impl(const WorkloadSpec& spec_in) {
  WorkloadSpec spec = spec_in;
  if (spec.threads < 1) throw std::invalid_argument("run_bench: threads must be >= 1");
  Adapter adapter(spec);
  spec.width = adapter.width();

  Recorder recorder;
  std::atomic<Item> value_counter{1};
  const ThreadId service_id = spec.threads;  // prefill/drain calls
  Recorder::Handle service = recorder.register_thread();

  const std::int64_t t_begin = Recorder::now_ns();

  for (std::uint64_t i = 0; i < spec.prefill; ++i) {
    Item v = value_counter.fetch_add(1);
    std::int64_t t0 = Recorder::now_ns();
    adapter.produce(v);
    service.record(producer_call(service_id, v, t0, Recorder::now_ns()));
  }

  std::vector<Recorder::Handle> handles;
  handles.reserve(spec.threads);
  for (unsigned t = 0; t < spec.threads; ++t) handles.push_back(recorder.register_thread());
  std::vector<std::vector<PendingConsumer>> pending(spec.threads);
  std::vector<std::uint64_t> per_thread_ops(spec.threads, 0);

  auto worker = [&](unsigned idx) {
    XorShift64 rng{splitmix64(spec.seed ^ splitmix64(idx + 1))};
    Recorder::Handle& h = handles[idx];
    for (std::uint64_t i = 0; i < spec.ops_per_thread; ++i) {
      if (draw_producer(spec.mix, rng, i)) {
        Item v = value_counter.fetch_add(1);
        std::int64_t t0 = Recorder::now_ns();
        adapter.produce(v);
        h.record(producer_call(static_cast<ThreadId>(idx), v, t0, Recorder::now_ns()));
      } else if constexpr (Adapter::kConserving) {
        std::int64_t t0 = Recorder::now_ns();
        Ticket tk = adapter.consume();
        if (auto v = tk.poll())
          h.record(consumer_call(static_cast<ThreadId>(idx), *v, t0, tk.fulfill_ns()));
        else
          pending[idx].push_back(PendingConsumer{std::move(tk),
                                                 static_cast<ThreadId>(idx), t0});
      } else {
        std::int64_t t0 = Recorder::now_ns();
        std::optional<Item> v = adapter.consume_opt();
        std::int64_t t1 = Recorder::now_ns();
        // Conditional semantics: a null consume is discarded, not recorded.
        if (v) h.record(consumer_call(static_cast<ThreadId>(idx), *v, t0, t1));
      }
      ++per_thread_ops[idx];
    }
    h.close();
  };

  if (spec.threads == 1) {
    worker(0);  // in-line for reproducibility and cheap sequential runs
  } else {
    std::vector<std::thread> threads;
    threads.reserve(spec.threads);
    for (unsigned t = 0; t < spec.threads; ++t) threads.emplace_back(worker, t);
    for (auto& th : threads) th.join();
  }

  adapter.quiesce();

  // Resolve consumer tickets fulfilled during the run, count the rest.
  std::vector<PendingConsumer> remaining;
  for (auto& vec : pending)
    for (PendingConsumer& pc : vec) {
      if (auto v = pc.ticket.poll())
        service.record(consumer_call(pc.thread, *v, pc.invoke_ns, pc.ticket.fulfill_ns()));
      else
        remaining.push_back(std::move(pc));
    }
  const std::uint64_t pending_before_drain = remaining.size();

  // Drain: issue producers until every ticket fulfills. Burst size tracks the
  // open ticket count; each producer fulfills at most one.
  std::uint64_t drain_producers = 0;
  if constexpr (Adapter::kConserving) {
    for (int rounds = 0; !remaining.empty(); ++rounds) {
      if (rounds > 10000)
        throw std::runtime_error("run_bench: drain failed to quiesce");
      std::size_t open = 0;
      for (PendingConsumer& pc : remaining)
        if (pc.ticket.state() == TicketState::Pending) ++open;
      if (open == 0) break;
      for (std::size_t i = 0; i < open; ++i) {
        Item v = value_counter.fetch_add(1);
        std::int64_t t0 = Recorder::now_ns();
        adapter.produce(v);
        service.record(producer_call(service_id, v, t0, Recorder::now_ns()));
        ++drain_producers;
      }
    }
    for (PendingConsumer& pc : remaining) {
      std::optional<Item> v = pc.ticket.wait();
      service.record(consumer_call(pc.thread, *v, pc.invoke_ns, pc.ticket.fulfill_ns()));
    }
  }
  service.close();

  const std::int64_t t_end = Recorder::now_ns();

  BenchResult result{BenchReport{}, recorder.merge()};
  BenchReport& r = result.report;
  r.spec = spec;
  r.completed_calls = result.history.size();
  r.wall_ns = t_end - t_begin;
  r.per_thread_ops = std::move(per_thread_ops);
  r.pending_before_drain = pending_before_drain;
  r.drain_producers = drain_producers;
  r.throughput_ops_per_us =
      r.wall_ns > 0 ? static_cast<double>(r.completed_calls) * 1000.0 /
                          static_cast<double>(r.wall_ns)
                    : 0.0;
  return result;
}

template <class Adapter>
BenchResult run_fill_drain_impl(const FillDrainSpec& fd) {
  WorkloadSpec spec;
  spec.structure = fd.structure;
  spec.threads = fd.threads;
  spec.ops_per_thread = fd.items_per_thread;
  spec.seed = fd.seed;
  spec.width = fd.width;
  spec.fail_threshold = fd.fail_threshold;
  if (spec.threads < 1)
    throw std::invalid_argument("run_fill_drain: threads must be >= 1");

  Adapter adapter(spec);
  spec.width = adapter.width();
  Recorder recorder;
  std::atomic<Item> value_counter{1};
  const std::uint64_t total = fd.items_per_thread * fd.threads;
  const std::int64_t t_begin = Recorder::now_ns();

  auto run_wave = [&](auto body) {
    std::vector<Recorder::Handle> handles;
    handles.reserve(fd.threads);
    for (unsigned t = 0; t < fd.threads; ++t)
      handles.push_back(recorder.register_thread());
    if (fd.threads == 1) {
      body(0, handles[0]);
      handles[0].close();
      return;
    }
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < fd.threads; ++t)
      threads.emplace_back([&, t] {
        body(t, handles[t]);
        handles[t].close();
      });
    for (auto& th : threads) th.join();
  };

  run_wave([&](unsigned idx, Recorder::Handle& h) {
    for (std::uint64_t i = 0; i < fd.items_per_thread; ++i) {
      Item v = value_counter.fetch_add(1);
      std::int64_t t0 = Recorder::now_ns();
      adapter.produce(v);
      h.record(producer_call(static_cast<ThreadId>(idx), v, t0, Recorder::now_ns()));
    }
  });

  adapter.quiesce();  // a parked fill operation must land before draining

  std::atomic<std::uint64_t> claimed{0};
  run_wave([&](unsigned idx, Recorder::Handle& h) {
    while (claimed.fetch_add(1) < total) {
      if constexpr (Adapter::kConserving) {
        for (;;) {
          std::int64_t t0 = Recorder::now_ns();
          Ticket tk = adapter.consume();
          if (auto v = tk.poll()) {
            h.record(consumer_call(static_cast<ThreadId>(idx), *v, t0, tk.fulfill_ns()));
            break;
          }
          // A pending request here means we raced; withdraw it and retry.
          // Claim accounting guarantees a value is resident for us.
          if (tk.cancel()) continue;
          std::optional<Item> v = tk.wait();
          h.record(consumer_call(static_cast<ThreadId>(idx), *v, t0, tk.fulfill_ns()));
          break;
        }
      } else {
        for (;;) {
          std::int64_t t0 = Recorder::now_ns();
          std::optional<Item> v = adapter.consume_opt();
          std::int64_t t1 = Recorder::now_ns();
          if (v) {
            h.record(consumer_call(static_cast<ThreadId>(idx), *v, t0, t1));
            break;
          }
          std::this_thread::yield();
        }
      }
    }
  });

  const std::int64_t t_end = Recorder::now_ns();
  BenchResult result{BenchReport{}, recorder.merge()};
  BenchReport& r = result.report;
  r.spec = spec;
  r.completed_calls = result.history.size();
  r.wall_ns = t_end - t_begin;
  r.throughput_ops_per_us =
      r.wall_ns > 0 ? static_cast<double>(r.completed_calls) * 1000.0 /
                          static_cast<double>(r.wall_ns)
                    : 0.0;
  return result;
}

}  // namespace

BenchResult run_bench(const WorkloadSpec& spec) {
  switch (spec.structure) {
    case StructureKind::QStack: return run_bench_impl<QStackAdapter>(spec);
    case StructureKind::QQueue: return run_bench_impl<QQueueAdapter>(spec);
    case StructureKind::Treiber: return run_bench_impl<TreiberAdapter>(spec);
    case StructureKind::BaseQueue: return run_bench_impl<BaseQueueAdapter>(spec);
  }
  throw std::invalid_argument("run_bench: unknown structure");
}

BenchResult run_fill_drain(const FillDrainSpec& spec) {
  switch (spec.structure) {
    case StructureKind::QStack: return run_fill_drain_impl<QStackAdapter>(spec);
    case StructureKind::QQueue: return run_fill_drain_impl<QQueueAdapter>(spec);
    case StructureKind::Treiber: return run_fill_drain_impl<TreiberAdapter>(spec);
    case StructureKind::BaseQueue: return run_fill_drain_impl<BaseQueueAdapter>(spec);
  }
  throw std::invalid_argument("run_fill_drain: unknown structure");
}

std::vector<std::int64_t> inversions(const std::vector<std::int64_t>& ranks) {
  const std::size_t n = ranks.size();
  std::vector<std::int64_t> x(n, 0);
  if (n < 2) return x;

  using Entry = std::pair<std::int64_t, std::uint32_t>;  // value, original index
  std::vector<Entry> cur(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) cur[i] = {ranks[i], static_cast<std::uint32_t>(i)};

  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      std::size_t mid = std::min(lo + width, n);
      std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      std::int64_t right_emitted = 0;
      while (i < mid && j < hi) {
        if (cur[i].first == cur[j].first)
          throw std::invalid_argument("inversions: ranks must be distinct");
        if (cur[i].first < cur[j].first) {
          x[cur[i].second] += right_emitted;
          tmp[k++] = cur[i++];
        } else {
          x[cur[j].second] += static_cast<std::int64_t>(mid - i);
          ++right_emitted;
          tmp[k++] = cur[j++];
        }
      }
      while (i < mid) {
        x[cur[i].second] += right_emitted;
        tmp[k++] = cur[i++];
      }
      while (j < hi) tmp[k++] = cur[j++];
    }
    cur.swap(tmp);
  }
  return x;
}

InversionStats entropy(const std::vector<std::int64_t>& counts) {
  if (counts.empty()) throw std::domain_error("entropy: empty count sequence");
  InversionStats stats;
  stats.counts = counts;
  std::map<std::int64_t, std::uint64_t> freq;
  for (std::int64_t v : counts) ++freq[v];
  const double n = static_cast<double>(counts.size());
  double h = 0.0;
  for (const auto& [value, k] : freq) {
    stats.distribution.emplace_back(value, k);
    double p = static_cast<double>(k) / n;
    h -= p * std::log2(p);  // p is never 0 over observed values
  }
  stats.entropy_bits = h + 0.0;  // normalize -0.0 from a point mass
  return stats;
}

std::string inversion_csv(const InversionStats& stats) {
  std::ostringstream out;
  out << "inversion_count,frequency,probability\n";
  const double n = static_cast<double>(stats.counts.size());
  out << std::setprecision(12);
  for (const auto& [value, k] : stats.distribution)
    out << value << ',' << k << ',' << (static_cast<double>(k) / n) << '\n';
  out << "# entropy_bits=" << stats.entropy_bits << '\n';
  return out.str();
}

std::vector<std::int64_t> rank_and_order(const History& h, Discipline d) {
  struct Completed {
    std::int64_t response;
    std::uint64_t seq;
    Config cfg;
  };
  std::vector<Completed> producers, consumers;
  for (const MethodCall& c : h.calls) {
    if (!c.completed()) continue;
    if (c.kind == MethodKind::Producer)
      producers.push_back({*c.response_ns, c.seq, Config{c.object, *c.item_in}});
    else if (c.kind == MethodKind::Consumer)
      consumers.push_back({*c.response_ns, c.seq, Config{c.object, *c.item_out}});
  }
  auto by_completion = [](const Completed& a, const Completed& b) {
    return a.response != b.response ? a.response < b.response : a.seq < b.seq;
  };
  std::sort(producers.begin(), producers.end(), by_completion);
  std::sort(consumers.begin(), consumers.end(), by_completion);

  std::unordered_map<Config, std::int64_t, ConfigHash> rank;
  rank.reserve(producers.size());
  for (std::size_t i = 0; i < producers.size(); ++i) {
    auto [it, inserted] = rank.try_emplace(producers[i].cfg, static_cast<std::int64_t>(i));
    if (!inserted)
      throw std::invalid_argument(
          "rank_and_order: duplicate produced configuration; run is not rank-instrumented");
  }

  std::vector<std::int64_t> out;
  out.reserve(consumers.size());
  for (const Completed& c : consumers) {
    auto it = rank.find(c.cfg);
    if (it == rank.end())
      throw std::invalid_argument(
          "rank_and_order: consumed value with no matching producer");
    out.push_back(d == Discipline::Lifo ? -it->second : it->second);
  }
  return out;
}

}  // namespace quant
