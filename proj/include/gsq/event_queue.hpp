#pragma once

#include <cstdint>
#include <vector>

#include "gsq/geometry.hpp"
#include "gsq/numeric.hpp"

namespace gsq {

enum class CertKind : std::uint8_t { TournamentMin, TournamentMax, Linking };

// Node address of a certificate owner inside a structure instance: which of
// the two mirrored trees, and the ternary (tournament) node id there. For
// linking certificates `link` points at the link record instead.
struct CertOwner {
  std::uint8_t side = 0;  // 0 = lower-left tree, 1 = upper-right tree
  std::uint32_t node = 0xffffffffu;
  std::uint32_t link = 0xffffffffu;
};

// A scheduled comparison between two linear motions. The assertion is
// lhs(t) <= rhs(t) (with id perturbation at exact equality); failure_time is
// the earliest violation at or after creation, or +infinity.
template <class M>
struct Certificate {
  Time<M> failure;
  CertKind kind = CertKind::TournamentMin;
  CertOwner owner;
  PointId lhs_id = kNoPoint;  // owner of the lhs motion
  PointId rhs_id = kNoPoint;  // owner of the rhs motion
};

struct QueueHandle {
  std::uint32_t slot = 0xffffffffu;
  std::uint32_t gen = 0;
  bool valid() const { return slot != 0xffffffffu; }
  static QueueHandle none() { return {}; }
};

// Earliest t >= now with lhs(t) > rhs(t), under (value, slope, id)
// perturbation; +infinity if the motions never cross. The assertion must hold
// at `now`: a strict violation is an invariant error in exact mode. In float
// mode values within eps are treated as equal and a strict violation is
// clamped to an immediate failure, so that roundoff near event times cannot
// abort a simulation.
template <class M>
Time<M> failure_time(const LinearMotion<M>& lhs, PointId lhs_id, const LinearMotion<M>& rhs,
                     PointId rhs_id, const typename M::Scalar& now, double eps = 0.0,
                     int id_dir = 1) {
  using S = typename M::Scalar;
  const S vl = lhs.at(now);
  const S vr = rhs.at(now);
  const int vc = scalar_cmp_eps(vl, vr, eps);
  if (vc > 0) {
    if (M::is_exact) throw invariant_error("failure_time: assertion already violated");
    return Time<M>(now);
  }
  const int sc = scalar_cmp(lhs.b, rhs.b);
  if (vc < 0) {
    if (sc <= 0) return Time<M>::inf();
    // lhs catches up: crossing of the two lines.
    return Time<M>((rhs.a - lhs.a) / (lhs.b - rhs.b));
  }
  // Equal values at now: order for t > now is decided by slopes, then ids.
  if (sc < 0) return Time<M>::inf();
  if (sc > 0) return Time<M>(now);
  if (lhs_id == rhs_id || (id_dir > 0 ? lhs_id < rhs_id : lhs_id > rhs_id)) return Time<M>::inf();
  throw invariant_error("failure_time: identical motions ordered against id perturbation");
}

// Addressable min-priority queue over certificates keyed by (failure_time,
// handle slot). Handles support O(log n) cancellation; certificates are
// destroyed en masse during subtree rebuilds, so lazy deletion would bloat
// the queue unboundedly. Slot generations catch use of dead handles.
template <class M>
class EventQueue {
 public:
  QueueHandle schedule(Certificate<M> cert) {
    std::uint32_t slot;
    if (!free_.empty()) {
      slot = free_.back();
      free_.pop_back();
    } else {
      slot = static_cast<std::uint32_t>(slots_.size());
      slots_.emplace_back();
    }
    Slot& s = slots_[slot];
    s.cert = std::move(cert);
    s.live = true;
    s.heap_pos = static_cast<std::uint32_t>(heap_.size());
    heap_.push_back(slot);
    sift_up(s.heap_pos);
    return {slot, s.gen};
  }

  void cancel(QueueHandle h) {
    Slot& s = checked(h, "cancel");
    remove_at(s.heap_pos);
    release(h.slot);
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  const Certificate<M>& top() const {
    GSQ_CHECK(!heap_.empty(), "EventQueue::top on empty queue");
    return slots_[heap_[0]].cert;
  }
  QueueHandle top_handle() const {
    GSQ_CHECK(!heap_.empty(), "EventQueue::top_handle on empty queue");
    return {heap_[0], slots_[heap_[0]].gen};
  }

  Certificate<M> pop() {
    GSQ_CHECK(!heap_.empty(), "EventQueue::pop on empty queue");
    const std::uint32_t slot = heap_[0];
    Certificate<M> cert = std::move(slots_[slot].cert);
    remove_at(0);
    release(slot);
    return cert;
  }

  // Pops the globally minimum certificate if it is due by `bound`.
  bool pop_due(const Time<M>& bound, Certificate<M>& out) {
    if (heap_.empty()) return false;
    if (time_cmp(slots_[heap_[0]].cert.failure, bound) > 0) return false;
    out = pop();
    return true;
  }

  const Certificate<M>& cert_of(QueueHandle h) const {
    return const_cast<EventQueue*>(this)->checked(h, "cert_of").cert;
  }
  bool live(QueueHandle h) const {
    return h.slot < slots_.size() && slots_[h.slot].live && slots_[h.slot].gen == h.gen;
  }

 private:
  struct Slot {
    Certificate<M> cert;
    std::uint32_t heap_pos = 0;
    std::uint32_t gen = 0;
    bool live = false;
  };

  Slot& checked(QueueHandle h, const char* what) {
    GSQ_CHECK(h.slot < slots_.size(), std::string("EventQueue::") + what + ": bad slot");
    Slot& s = slots_[h.slot];
    GSQ_CHECK(s.live && s.gen == h.gen, std::string("EventQueue::") + what + ": dead handle");
    return s;
  }

  void release(std::uint32_t slot) {
    slots_[slot].live = false;
    ++slots_[slot].gen;
    free_.push_back(slot);
  }

  // (failure_time, slot) ordering; the slot tiebreak makes processing of
  // simultaneous failures deterministic.
  bool before(std::uint32_t a, std::uint32_t b) const {
    const int c = time_cmp(slots_[a].cert.failure, slots_[b].cert.failure);
    if (c != 0) return c < 0;
    return a < b;
  }

  void sift_up(std::uint32_t pos) {
    const std::uint32_t slot = heap_[pos];
    while (pos > 0) {
      const std::uint32_t parent = (pos - 1) / 2;
      if (!before(slot, heap_[parent])) break;
      heap_[pos] = heap_[parent];
      slots_[heap_[pos]].heap_pos = pos;
      pos = parent;
    }
    heap_[pos] = slot;
    slots_[slot].heap_pos = pos;
  }

  void sift_down(std::uint32_t pos) {
    const std::uint32_t slot = heap_[pos];
    const std::uint32_t n = static_cast<std::uint32_t>(heap_.size());
    for (;;) {
      std::uint32_t child = 2 * pos + 1;
      if (child >= n) break;
      if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], slot)) break;
      heap_[pos] = heap_[child];
      slots_[heap_[pos]].heap_pos = pos;
      pos = child;
    }
    heap_[pos] = slot;
    slots_[slot].heap_pos = pos;
  }

  void remove_at(std::uint32_t pos) {
    const std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (pos < heap_.size()) {
      heap_[pos] = last;
      slots_[last].heap_pos = pos;
      sift_down(pos);
      sift_up(slots_[last].heap_pos);
    }
  }

  std::vector<Slot> slots_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::uint32_t> free_;
};

}  // namespace gsq
