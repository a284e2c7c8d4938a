#include "quant/oracle.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace quant::oracle {

using boost::multiprecision::cpp_int;

namespace {

std::size_t completed_count(const History& h) {
  std::size_t n = 0;
  for (const MethodCall& c : h.calls)
    if (c.completed()) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Conservative-ordering search

enum class EventType : std::uint8_t { Produce, Consume, Read };

struct Event {
  EventType type;
  std::size_t cfg;
  bool operator<(const Event& o) const {
    return type != o.type ? type < o.type : cfg < o.cfg;
  }
  bool operator==(const Event& o) const = default;
};

struct Search {
  std::vector<Event> distinct;        // sorted distinct events
  std::vector<int> remaining;         // multiset counts, parallel to distinct
  std::vector<std::int64_t> stock;    // per basis index
  std::vector<char> produced_ever;    // per basis index
  std::unordered_set<std::string> failed;

  std::string key() const {
    return std::string(reinterpret_cast<const char*>(remaining.data()),
                       remaining.size() * sizeof(int));
  }

  bool run() {
    bool done = true;
    for (int r : remaining)
      if (r != 0) { done = false; break; }
    if (done) return true;
    std::string k = key();
    if (failed.count(k)) return false;

    for (std::size_t e = 0; e < distinct.size(); ++e) {
      if (remaining[e] == 0) continue;
      const Event& ev = distinct[e];
      switch (ev.type) {
        case EventType::Produce:
          --remaining[e];
          ++stock[ev.cfg];
          produced_ever[ev.cfg] = 1;  // sticky; never un-set on backtrack
          if (run()) return true;
          --stock[ev.cfg];
          ++remaining[e];
          break;
        case EventType::Consume:
          if (stock[ev.cfg] < 1) continue;
          --remaining[e];
          --stock[ev.cfg];
          if (run()) return true;
          ++stock[ev.cfg];
          ++remaining[e];
          break;
        case EventType::Read:
          if (!produced_ever[ev.cfg]) continue;
          --remaining[e];
          if (run()) return true;
          ++remaining[e];
          break;
      }
    }
    failed.insert(std::move(k));
    return false;
  }
};

}  // namespace

bool exists_conservative_ordering(const History& h) {
  if (completed_count(h) > 10)
    throw std::length_error(
        "exists_conservative_ordering: more than 10 completed calls");

  std::map<Event, int> counts;
  for (const MethodCall& c : h.calls) {
    if (!c.completed()) continue;
    switch (c.kind) {
      case MethodKind::Producer:
        ++counts[Event{EventType::Produce, *h.basis.find(c.object, *c.item_in)}];
        break;
      case MethodKind::Consumer:
        ++counts[Event{EventType::Consume, *h.basis.find(c.object, *c.item_out)}];
        break;
      case MethodKind::Reader:
        ++counts[Event{EventType::Read, *h.basis.find(c.object, *c.item_out)}];
        break;
      case MethodKind::Writer: {
        std::size_t j = *h.basis.find(c.object, *c.item_in);
        std::size_t k = *h.basis.find(c.object, *c.prev);
        if (j != k) {
          ++counts[Event{EventType::Produce, j}];
          ++counts[Event{EventType::Consume, k}];
        }
        break;
      }
    }
  }

  Search s;
  for (const auto& [ev, n] : counts) {
    s.distinct.push_back(ev);
    s.remaining.push_back(n);
  }
  s.stock.assign(h.basis.count(), 0);

  // produced_ever stays set across backtracking. A produce event has no
  // precondition, so any sequence admitted through a stale flag can be
  // reordered with that produce moved first, which is a valid sequence over
  // the same multiset; existence is unaffected. The same argument makes the
  // failure memo sound with the remaining multiset alone as key.
  s.produced_ever.assign(h.basis.count(), 0);
  return s.run();
}

// ---------------------------------------------------------------------------
// Literal dyadic-rational evaluation

namespace {

// Exact value num / 2^exp.
struct Dyadic {
  cpp_int num = 0;
  unsigned exp = 0;

  static Dyadic from_int(std::int64_t v) { return Dyadic{cpp_int(v), 0}; }

  // (1/2)^k
  static Dyadic half_pow(unsigned k) { return Dyadic{cpp_int(1), k}; }

  void align_to(unsigned e) {
    num <<= (e - exp);
    exp = e;
  }

  Dyadic& operator+=(Dyadic other) {
    unsigned e = std::max(exp, other.exp);
    align_to(e);
    other.align_to(e);
    num += other.num;
    return *this;
  }

  Dyadic& operator-=(Dyadic other) {
    unsigned e = std::max(exp, other.exp);
    align_to(e);
    other.align_to(e);
    num -= other.num;
    return *this;
  }

  Dyadic operator+(const Dyadic& o) const {
    Dyadic r = *this;
    r += o;
    return r;
  }

  bool negative() const { return num < 0; }

  cpp_int floor() const {
    if (exp == 0) return num;
    cpp_int d = cpp_int(1) << exp;
    cpp_int q = num / d, r = num % d;
    if (r != 0 && num < 0) --q;
    return q;
  }

  cpp_int ceil() const {
    if (exp == 0) return num;
    cpp_int d = cpp_int(1) << exp;
    cpp_int q = num / d, r = num % d;
    if (r != 0 && num > 0) ++q;
    return q;
  }
};

Dyadic scale_half(Dyadic v) {
  v.exp += 1;
  return v;
}

}  // namespace

bool naive_definition2(const History& h) {
  if (completed_count(h) > 10000)
    throw std::length_error("naive_definition2: more than 10^4 completed calls");

  const std::size_t c = h.basis.count();
  std::vector<cpp_int> P(c, 0), C(c, 0), Wprod(c, 0), Wcons(c, 0);
  std::vector<Dyadic> R(c);
  std::vector<std::int64_t> read_index(c, 0);

  for (const MethodCall& call : h.calls) {
    if (!call.completed()) continue;
    switch (call.kind) {
      case MethodKind::Producer:
        P[*h.basis.find(call.object, *call.item_in)] += 1;
        break;
      case MethodKind::Consumer:
        C[*h.basis.find(call.object, *call.item_out)] -= 1;
        break;
      case MethodKind::Reader: {
        std::size_t j = *h.basis.find(call.object, *call.item_out);
        read_index[j] += 1;
        R[j] -= Dyadic::half_pow(static_cast<unsigned>(read_index[j]));
        break;
      }
      case MethodKind::Writer: {
        std::size_t j = *h.basis.find(call.object, *call.item_in);
        std::size_t k = *h.basis.find(call.object, *call.prev);
        // The writer's own vector v has v[j]=1, v[k]=-1 when j != k and is
        // zero otherwise. Its halves are evaluated through the formulas
        // floor((v+1)/2) and ceil((v-1)/2); entries where v is 0 give
        // floor(1/2) = 0 and ceil(-1/2) = 0 and are skipped.
        if (j != k) {
          Dyadic vj = Dyadic::from_int(1), vk = Dyadic::from_int(-1);
          Wprod[j] += scale_half(vj + Dyadic::from_int(1)).floor();
          Wprod[k] += scale_half(vk + Dyadic::from_int(1)).floor();
          Wcons[j] += scale_half(vj + Dyadic::from_int(-1)).ceil();
          Wcons[k] += scale_half(vk + Dyadic::from_int(-1)).ceil();
        }
        break;
      }
    }
  }

  for (std::size_t i = 0; i < c; ++i) {
    if (P[i] + Wprod[i] >= 1) {
      Dyadic inner = R[i];
      inner += Dyadic{P[i] + Wprod[i], 0};
      cpp_int Hi = inner.ceil() + Wcons[i] + C[i];
      if (Hi < 0) return false;
    } else {
      Dyadic Hi = R[i];
      Hi += Dyadic{P[i] + Wprod[i] + Wcons[i] + C[i], 0};
      if (Hi.negative()) return false;
    }
  }
  return true;
}

std::vector<std::int64_t> brute_inversions(const std::vector<std::int64_t>& seq) {
  if (seq.size() > 10000)
    throw std::length_error("brute_inversions: more than 10^4 elements");
  const std::size_t n = seq.size();
  std::vector<std::int64_t> x(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i)
      if (seq[i] > seq[j]) ++x[j];
    for (std::size_t i = j + 1; i < n; ++i)
      if (seq[i] < seq[j]) ++x[j];
  }
  return x;
}

}  // namespace quant::oracle
