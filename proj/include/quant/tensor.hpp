// Dense order-4 view of a history vector over items x objects x processes x
// methods, with dimension reduction by summation. The analysis path here is
// for inspection and cross-checking; the sparse verifier stays authoritative.
#pragma once

#include <cstdint>
#include <vector>

#include "quant/history.hpp"

namespace quant {

struct TensorShape {
  std::size_t items = 0;      // dI, varies fastest
  std::size_t objects = 0;    // dO
  std::size_t processes = 0;  // dP
  std::size_t methods = 0;    // dM, varies slowest
  std::size_t size() const { return items * objects * processes * methods; }
  bool operator==(const TensorShape&) const = default;
};

// Mode-1 (first-index-fastest) layout. The linear index of (i,o,p,m), all
// 0-based, is i + dI*(o + dO*(p + dP*m)); the published bijection is the
// same map written 1-based.
struct HistoryTensor {
  TensorShape shape;
  std::vector<double> data;

  double at(std::size_t i, std::size_t o, std::size_t p, std::size_t m) const {
    return data[i + shape.items * (o + shape.objects * (p + shape.processes * m))];
  }
};

struct IOMatrix {
  std::size_t items = 0;
  std::size_t objects = 0;
  std::vector<double> data;  // item index fastest

  double at(std::size_t i, std::size_t o) const { return data[i + items * o]; }
};

enum class Axis : std::uint8_t { Process, Method };

// Throws std::invalid_argument unless vec.size() == shape.size().
HistoryTensor fold(const std::vector<double>& vec, TensorShape shape);
std::vector<double> unfold(const HistoryTensor& t);

// Sums along the named axes, keeping them as size-1 dimensions so partial
// reductions compose; axes may contain Process, Method or both.
HistoryTensor sum_over(const HistoryTensor& t, const std::vector<Axis>& axes);

// Extracts the items x objects matrix from a tensor whose process and method
// axes have been reduced to size 1.
IOMatrix as_matrix(const HistoryTensor& t);

// True iff every element is >= 0. Agrees with verify() on producer/consumer
// histories; reader contributions are dyadic and outside this path.
bool is_quantifiable_matrix(const IOMatrix& m);

// Sums of absolute values along Method and Process; elementwise >= |H_io|.
IOMatrix heatmap(const HistoryTensor& t);

// A history vector in the full dense layout: producer +1, consumer -1,
// writers expanded to +1/-1 at (new, prev) when they differ, reader r-th
// read of a configuration contributing -(1/2)^r. Axis labels are the
// observed values in ascending order; methods keep the fixed order
// producer, consumer, reader, writer filtered to the kinds present.
// Pending calls contribute nothing.
struct VectorizedHistory {
  std::vector<double> vec;
  TensorShape shape;
  std::vector<Item> items;
  std::vector<ObjectId> objects;
  std::vector<ThreadId> processes;
  std::vector<MethodKind> methods;
};

VectorizedHistory vectorize(const History& h);

// Same, padding each dimension up to the given extent (zero elsewhere).
// Throws std::invalid_argument if any extent is below the observed count.
VectorizedHistory vectorize(const History& h, TensorShape padded);

}  // namespace quant
