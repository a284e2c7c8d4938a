#include "quant/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace quant {

HistoryTensor fold(const std::vector<double>& vec, TensorShape shape) {
  if (vec.size() != shape.size())
    throw std::invalid_argument(
        "fold: vector length " + std::to_string(vec.size()) +
        " does not match shape product " + std::to_string(shape.size()));
  return HistoryTensor{shape, vec};
}

std::vector<double> unfold(const HistoryTensor& t) { return t.data; }

HistoryTensor sum_over(const HistoryTensor& t, const std::vector<Axis>& axes) {
  bool sum_p = false, sum_m = false;
  for (Axis a : axes) (a == Axis::Process ? sum_p : sum_m) = true;
  if (!sum_p && !sum_m)
    throw std::invalid_argument("sum_over: axes must name Process and/or Method");

  TensorShape out = t.shape;
  if (sum_p) out.processes = 1;
  if (sum_m) out.methods = 1;

  HistoryTensor r{out, std::vector<double>(out.size(), 0.0)};
  const TensorShape& s = t.shape;
  for (std::size_t m = 0; m < s.methods; ++m)
    for (std::size_t p = 0; p < s.processes; ++p)
      for (std::size_t o = 0; o < s.objects; ++o)
        for (std::size_t i = 0; i < s.items; ++i) {
          std::size_t pm = sum_p ? 0 : p;
          std::size_t mm = sum_m ? 0 : m;
          r.data[i + out.items * (o + out.objects * (pm + out.processes * mm))] +=
              t.at(i, o, p, m);
        }
  return r;
}

IOMatrix as_matrix(const HistoryTensor& t) {
  if (t.shape.processes != 1 || t.shape.methods != 1)
    throw std::invalid_argument("as_matrix: process/method axes not reduced");
  return IOMatrix{t.shape.items, t.shape.objects, t.data};
}

bool is_quantifiable_matrix(const IOMatrix& m) {
  return std::all_of(m.data.begin(), m.data.end(), [](double v) { return v >= 0.0; });
}

IOMatrix heatmap(const HistoryTensor& t) {
  const TensorShape& s = t.shape;
  IOMatrix r{s.items, s.objects, std::vector<double>(s.items * s.objects, 0.0)};
  for (std::size_t m = 0; m < s.methods; ++m)
    for (std::size_t p = 0; p < s.processes; ++p)
      for (std::size_t o = 0; o < s.objects; ++o)
        for (std::size_t i = 0; i < s.items; ++i)
          r.data[i + s.items * o] += std::abs(t.at(i, o, p, m));
  return r;
}

namespace {

template <typename T>
std::size_t rank_of(const std::vector<T>& sorted, T v) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

namespace {

VectorizedHistory observe_labels(const History& h) {
  std::set<Item> items;
  std::set<ObjectId> objects;
  std::set<ThreadId> processes;
  std::set<MethodKind> kinds;
  for (const MethodCall& c : h.calls) {
    if (!c.completed()) continue;
    objects.insert(c.object);
    processes.insert(c.thread);
    kinds.insert(c.kind);
    if (c.item_in) items.insert(*c.item_in);
    if (c.item_out) items.insert(*c.item_out);
    if (c.prev) items.insert(*c.prev);
  }
  VectorizedHistory v;
  v.items.assign(items.begin(), items.end());
  v.objects.assign(objects.begin(), objects.end());
  v.processes.assign(processes.begin(), processes.end());
  for (MethodKind k : {MethodKind::Producer, MethodKind::Consumer,
                       MethodKind::Reader, MethodKind::Writer})
    if (kinds.count(k)) v.methods.push_back(k);
  return v;
}

}  // namespace

VectorizedHistory vectorize(const History& h, TensorShape padded) {
  VectorizedHistory v = observe_labels(h);
  TensorShape observed{v.items.size(), v.objects.size(), v.processes.size(),
                       v.methods.size()};
  if (padded.items < observed.items || padded.objects < observed.objects ||
      padded.processes < observed.processes || padded.methods < observed.methods)
    throw std::invalid_argument("vectorize: requested shape below observed extents");
  v.shape = padded;
  v.vec.assign(padded.size(), 0.0);

  auto slot = [&](Item it, ObjectId ob, ThreadId pr, MethodKind k) {
    std::size_t i = rank_of(v.items, it);
    std::size_t o = rank_of(v.objects, ob);
    std::size_t p = rank_of(v.processes, pr);
    std::size_t m = static_cast<std::size_t>(
        std::find(v.methods.begin(), v.methods.end(), k) - v.methods.begin());
    return i + padded.items * (o + padded.objects * (p + padded.processes * m));
  };

  // Read index is global per configuration, matching the value assignment.
  std::unordered_map<Config, std::int64_t, ConfigHash> read_index;

  for (const MethodCall& c : h.calls) {
    if (!c.completed()) continue;
    switch (c.kind) {
      case MethodKind::Producer:
        v.vec[slot(*c.item_in, c.object, c.thread, c.kind)] += 1.0;
        break;
      case MethodKind::Consumer:
        v.vec[slot(*c.item_out, c.object, c.thread, c.kind)] -= 1.0;
        break;
      case MethodKind::Reader: {
        std::int64_t r = ++read_index[Config{c.object, *c.item_out}];
        v.vec[slot(*c.item_out, c.object, c.thread, c.kind)] -=
            std::pow(0.5, static_cast<double>(r));
        break;
      }
      case MethodKind::Writer:
        if (*c.item_in != *c.prev) {
          v.vec[slot(*c.item_in, c.object, c.thread, c.kind)] += 1.0;
          v.vec[slot(*c.prev, c.object, c.thread, c.kind)] -= 1.0;
        }
        break;
    }
  }
  return v;
}

VectorizedHistory vectorize(const History& h) {
  VectorizedHistory v = observe_labels(h);
  return vectorize(h, TensorShape{v.items.size(), v.objects.size(),
                                  v.processes.size(), v.methods.size()});
}

}  // namespace quant
