#pragma once

#include <cstdint>
#include <utility>

#include "gsq/numeric.hpp"

namespace gsq {

// Glyph identifier. Unique within one engine instance; ids of merged glyphs
// are freshly assigned and never reused within a simulation run.
using PointId = std::uint32_t;
inline constexpr PointId kNoPoint = 0xffffffffu;

enum class CornerKind : std::uint8_t { LowerLeft, UpperRight };
enum class Axis : std::uint8_t { X, Y };

// A glyph center with positive weight. The square of p at time t is centered
// at (x, y) with side length t*w, so it degenerates to the center at t = 0.
template <class M>
struct WeightedPoint {
  PointId id = kNoPoint;
  typename M::Scalar x{};
  typename M::Scalar y{};
  typename M::Scalar w{};
};

// A coordinate moving as value(t) = a + b*t. Square corners move this way
// with |b| = w/2.
template <class M>
struct LinearMotion {
  typename M::Scalar a{};  // position at t = 0
  typename M::Scalar b{};  // signed half-weight slope

  typename M::Scalar at(const typename M::Scalar& t) const { return a + b * t; }
};

// Projection onto the slope -1 line, i.e. x - y. Constant in time for every
// corner of a growing square, since corners move along slope-one lines.
// Ties between equal projections are broken by id.
template <class M>
struct GammaKey {
  typename M::Scalar value{};
  PointId tiebreak = kNoPoint;

  friend int cmp(const GammaKey& a, const GammaKey& b) {
    int c = scalar_cmp(a.value, b.value);
    if (c != 0) return c;
    if (a.tiebreak == b.tiebreak) return 0;
    return a.tiebreak < b.tiebreak ? -1 : 1;
  }
  friend bool operator<(const GammaKey& a, const GammaKey& b) { return cmp(a, b) < 0; }
  friend bool operator==(const GammaKey& a, const GammaKey& b) { return cmp(a, b) == 0; }
};

enum class DominanceClass : std::uint8_t { NotDominating, DMinus, DPlus };

// Symbolically perturbed coordinate comparison: equal values fall back to id
// order. dir = +1 perturbs ids upward (ascending id breaks the tie), dir = -1
// the mirror image; reflected frames need the mirrored direction so that a
// reflection exactly reverses every comparison.
template <class S>
inline bool coord_less(const S& a, PointId ia, const S& b, PointId ib, int dir = 1) {
  const int c = scalar_cmp(a, b);
  if (c != 0) return c < 0;
  if (ia == ib) return false;
  return dir > 0 ? ia < ib : ia > ib;
}

template <class M>
LinearMotion<M> corner_motion(const WeightedPoint<M>& p, CornerKind corner, Axis axis) {
  const typename M::Scalar half = p.w / 2;
  const typename M::Scalar& pos = (axis == Axis::X) ? p.x : p.y;
  if (corner == CornerKind::LowerLeft) return {pos, typename M::Scalar(-half)};
  return {pos, half};
}

template <class M>
GammaKey<M> gamma_key(const WeightedPoint<M>& p) {
  return {typename M::Scalar(p.x - p.y), p.id};
}

// p dominates q iff q_x <= p_x and q_y <= p_y, under perturbed comparison.
template <class M>
bool dominates(const WeightedPoint<M>& p, const WeightedPoint<M>& q) {
  return coord_less(q.x, q.id, p.x, p.id) && coord_less(q.y, q.id, p.y, p.id);
}

template <class M>
DominanceClass classify(const WeightedPoint<M>& p, const WeightedPoint<M>& q) {
  if (!dominates(p, q)) return DominanceClass::NotDominating;
  return gamma_key(p) < gamma_key(q) ? DominanceClass::DMinus : DominanceClass::DPlus;
}

// First t >= 0 at which the closed squares of p and q intersect. Boundary
// contact counts as intersection, which makes this exactly
// 2*max(|dx|, |dy|)/(w_p + w_q); always finite for positive weights.
template <class M>
typename M::Scalar pairwise_intersection_time(const WeightedPoint<M>& p,
                                              const WeightedPoint<M>& q) {
  using S = typename M::Scalar;
  S dx = p.x - q.x;
  if (scalar_cmp(dx, S(0)) < 0) dx = -dx;
  S dy = p.y - q.y;
  if (scalar_cmp(dy, S(0)) < 0) dy = -dy;
  const S& gap = scalar_cmp(dx, dy) >= 0 ? dx : dy;
  return 2 * gap / (p.w + q.w);
}

// Weighted merge: the replacement glyph sits at the weight-weighted average
// of the two centers and carries the combined weight.
template <class M>
WeightedPoint<M> merge(const WeightedPoint<M>& p, const WeightedPoint<M>& q, PointId fresh_id) {
  using S = typename M::Scalar;
  const S total = p.w + q.w;
  WeightedPoint<M> z;
  z.id = fresh_id;
  z.x = (p.w * p.x + q.w * q.x) / total;
  z.y = (p.w * p.y + q.w * q.y) / total;
  z.w = total;
  return z;
}

// Closed-square overlap predicate at time t; the independent test oracle for
// pairwise_intersection_time and the engine's query semantics.
template <class M>
bool squares_intersect_at(const WeightedPoint<M>& p, const WeightedPoint<M>& q,
                          const typename M::Scalar& t) {
  using S = typename M::Scalar;
  S dx = p.x - q.x;
  if (scalar_cmp(dx, S(0)) < 0) dx = -dx;
  S dy = p.y - q.y;
  if (scalar_cmp(dy, S(0)) < 0) dy = -dy;
  const S reach = t * (p.w + q.w) / 2;
  return scalar_cmp(dx, reach) <= 0 && scalar_cmp(dy, reach) <= 0;
}

}  // namespace gsq
