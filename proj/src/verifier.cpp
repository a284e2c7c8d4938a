#include "quant/verifier.hpp"

#include <stdexcept>

namespace quant {

const char* reason_name(ViolationReason r) {
  switch (r) {
    case ViolationReason::OverConsume: return "over-consume";
    case ViolationReason::OverWrite: return "over-write";
    case ViolationReason::ReadUnproduced: return "read-unproduced";
  }
  return "?";
}

KindSums assign_values(const History& h) {
  KindSums s;
  s.c = h.basis.count();
  s.p.assign(s.c, 0);
  s.w_prod.assign(s.c, 0);
  s.w_cons.assign(s.c, 0);
  s.c_sum.assign(s.c, 0);
  s.read_count.assign(s.c, 0);

  for (const MethodCall& call : h.calls) {
    if (!call.completed()) continue;
    std::string reason = describe_malformed(call);
    if (!reason.empty())
      throw std::invalid_argument("assign_values: seq " + std::to_string(call.seq) +
                                  ": " + reason);
    switch (call.kind) {
      case MethodKind::Producer: {
        std::size_t j = *h.basis.find(call.object, *call.item_in);
        s.p[j] += 1;
        break;
      }
      case MethodKind::Consumer: {
        std::size_t j = *h.basis.find(call.object, *call.item_out);
        s.c_sum[j] -= 1;
        break;
      }
      case MethodKind::Reader: {
        std::size_t j = *h.basis.find(call.object, *call.item_out);
        s.read_count[j] += 1;
        break;
      }
      case MethodKind::Writer: {
        std::size_t j = *h.basis.find(call.object, *call.item_in);
        std::size_t k = *h.basis.find(call.object, *call.prev);
        if (j != k) {  // identical prev/new leaves no net state change
          s.w_prod[j] += 1;
          s.w_cons[k] -= 1;
        }
        break;
      }
    }
  }
  return s;
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> split_writer(
    const std::vector<std::int64_t>& v) {
  std::vector<std::int64_t> prod(v.size()), cons(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::int64_t x = v[i];
    if (x < -1 || x > 1)
      throw std::domain_error("split_writer: entry " + std::to_string(x) +
                              " outside {-1,0,1}");
    // floor((x+1)/2) and ceil((x-1)/2) over x in {-1,0,1}
    prod[i] = (x + 1) >> 1;
    cons[i] = x == -1 ? -1 : 0;
  }
  return {std::move(prod), std::move(cons)};
}

Verdict verify(const History& h) {
  KindSums s = assign_values(h);
  Verdict v;
  v.h_floor.resize(s.c);
  for (const MethodCall& call : h.calls)
    if (!call.completed()) ++v.pending_calls;

  for (std::size_t i = 0; i < s.c; ++i) {
    std::int64_t net = s.p[i] + s.w_prod[i] + s.w_cons[i] + s.c_sum[i];
    std::int64_t floor_i;
    if (s.p[i] + s.w_prod[i] >= 1) {
      floor_i = net;
    } else {
      // p+w_prod == 0 here; R in (-1,0] pushes the floor down one step
      // exactly when reads exist.
      floor_i = s.w_cons[i] + s.c_sum[i] + (s.read_count[i] > 0 ? -1 : 0);
    }
    v.h_floor[i] = floor_i;
    if (floor_i < 0) {
      v.quantifiable = false;
      ViolationReason reason;
      if (s.c_sum[i] < 0)
        reason = ViolationReason::OverConsume;
      else if (s.w_cons[i] < 0)
        reason = ViolationReason::OverWrite;
      else
        reason = ViolationReason::ReadUnproduced;
      v.violations.push_back(Violation{h.basis.config_at(i), reason});
    }
  }
  return v;
}

Verdict verify_projection(const History& h, ObjectId object) {
  return verify(project(h, object));
}

}  // namespace quant
