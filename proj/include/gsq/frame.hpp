#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsq/geometry.hpp"
#include "gsq/numeric.hpp"

namespace gsq {

// Reserved id for transient query points (never stored in any tree).
inline constexpr PointId kQueryId = 0xfffffffeu;

// Id-indexed store of glyph centers shared by every structure instance of an
// engine. Kept as one flat array per derived coordinate, so the tree
// comparators touch a single densely packed value per point; every quadrant
// frame reads its axis from one of these arrays. Slot kQueryId aliases a
// scratch point so comparators can also rank an external query point.
template <class M>
class Registry {
 public:
  using S = typename M::Scalar;

  enum Field : std::uint8_t {
    kX = 0,
    kY,
    kW,
    kNegX,
    kNegY,
    kGamma,    // x - y
    kNegGamma, // y - x
    kSum,      // x + y
    kNegSum,   // -x - y
    kHalfW,
    kFieldCount
  };

  PointId add(const WeightedPoint<M>& p) {
    if (p.id >= alive_.size()) {
      alive_.resize(p.id + 1, 0);
      for (auto& f : fields_) f.resize(p.id + 1);
      for (auto& f : approx_) f.resize(p.id + 1);
    }
    GSQ_CHECK(!alive_[p.id], "Registry: id already live");
    set_fields(fields_, p.id, p.x, p.y, p.w);
    for (int f = 0; f < kFieldCount; ++f) approx_[f][p.id] = to_double(fields_[f][p.id]);
    alive_[p.id] = 1;
    ++live_;
    return p.id;
  }
  void remove(PointId id) {
    GSQ_CHECK(alive(id), "Registry: removing dead id");
    alive_[id] = 0;
    --live_;
  }
  bool alive(PointId id) const { return id < alive_.size() && alive_[id]; }
  std::uint32_t live_count() const { return live_; }
  std::size_t id_bound() const { return alive_.size(); }

  const S& value(Field f, PointId id) const {
    return id == kQueryId ? query_[f] : fields_[f][id];
  }
  // Double approximation of a field, used as a floating-point filter in
  // front of exact comparisons.
  double approx(Field f, PointId id) const {
    return id == kQueryId ? query_approx_[f] : approx_[f][id];
  }
  WeightedPoint<M> point(PointId id) const {
    return {id, value(kX, id), value(kY, id), value(kW, id)};
  }
  void set_query(const S& x, const S& y, const S& w) {
    set_fields_one(query_, x, y, w);
    for (int f = 0; f < kFieldCount; ++f) query_approx_[f] = to_double(query_[f]);
  }

  template <class F>
  void for_alive(F&& f) const {
    for (PointId i = 0; i < alive_.size(); ++i)
      if (alive_[i]) f(i);
  }

 private:
  static void set_fields(std::array<std::vector<S>, kFieldCount>& dst, PointId id, const S& x,
                         const S& y, const S& w) {
    dst[kX][id] = x;
    dst[kY][id] = y;
    dst[kW][id] = w;
    dst[kNegX][id] = -x;
    dst[kNegY][id] = -y;
    dst[kGamma][id] = x - y;
    dst[kNegGamma][id] = y - x;
    dst[kSum][id] = x + y;
    dst[kNegSum][id] = -(x + y);
    dst[kHalfW][id] = w / 2;
  }
  void set_fields_one(std::array<S, kFieldCount>& dst, const S& x, const S& y, const S& w) {
    dst[kX] = x;
    dst[kY] = y;
    dst[kW] = w;
    dst[kNegX] = -x;
    dst[kNegY] = -y;
    dst[kGamma] = x - y;
    dst[kNegGamma] = y - x;
    dst[kSum] = x + y;
    dst[kNegSum] = -(x + y);
    dst[kHalfW] = w / 2;
  }

  std::array<std::vector<S>, kFieldCount> fields_;
  std::array<std::vector<double>, kFieldCount> approx_;
  std::array<S, kFieldCount> query_{};
  std::array<double, kFieldCount> query_approx_{};
  std::vector<std::uint8_t> alive_;
  std::uint32_t live_ = 0;
};

// Axis transform applied to coordinates before they enter a structure
// instance: X = sx * (swap ? y : x), Y = sy * (swap ? x : y). The identity
// and x-reflection cover all dominance-comparable pairs; the swapped frames
// realize the variant that detects pairs meeting on the other square edge
// (tournaments then run on what was the y-axis). Weights are unchanged.
struct Frame {
  bool swapped = false;
  std::int8_t sx = 1, sy = 1;

  int dir_x() const { return sx; }
  int dir_y() const { return sy; }
  int dir_gamma() const { return swapped ? -1 : 1; }
};

enum class FrameAxis : std::uint8_t { X, Y, Gamma };

namespace frame_detail {

template <class M>
typename Registry<M>::Field axis_field(const Frame& f, FrameAxis axis) {
  using R = Registry<M>;
  switch (axis) {
    case FrameAxis::X:
      if (f.swapped) return f.sx > 0 ? R::kY : R::kNegY;
      return f.sx > 0 ? R::kX : R::kNegX;
    case FrameAxis::Y:
      if (f.swapped) return f.sy > 0 ? R::kX : R::kNegX;
      return f.sy > 0 ? R::kY : R::kNegY;
    default:
      break;
  }
  // gamma = X - Y, always one of the cached combinations
  if (!f.swapped) {
    if (f.sx > 0) return f.sy > 0 ? R::kGamma : R::kSum;
    return f.sy > 0 ? R::kNegSum : R::kNegGamma;
  }
  if (f.sx > 0) return f.sy > 0 ? R::kNegGamma : R::kSum;
  return f.sy > 0 ? R::kNegSum : R::kGamma;
}

inline int axis_dir(const Frame& f, FrameAxis axis) {
  switch (axis) {
    case FrameAxis::X: return f.dir_x();
    case FrameAxis::Y: return f.dir_y();
    default: return f.dir_gamma();
  }
}

}  // namespace frame_detail

template <class M>
const typename M::Scalar& frame_x(const Registry<M>& reg, const Frame& f, PointId id) {
  return reg.value(frame_detail::axis_field<M>(f, FrameAxis::X), id);
}

template <class M>
const typename M::Scalar& frame_y(const Registry<M>& reg, const Frame& f, PointId id) {
  return reg.value(frame_detail::axis_field<M>(f, FrameAxis::Y), id);
}

template <class M>
const typename M::Scalar& frame_gamma(const Registry<M>& reg, const Frame& f, PointId id) {
  return reg.value(frame_detail::axis_field<M>(f, FrameAxis::Gamma), id);
}

// Strict total order on points along one frame axis; exact value comparison
// with id perturbation whose direction flips under reflection.
template <class M>
struct KeyLess {
  const Registry<M>* reg = nullptr;
  typename Registry<M>::Field field = Registry<M>::kX;
  int dir = 1;

  KeyLess() = default;
  KeyLess(const Registry<M>* r, const Frame& f, FrameAxis axis)
      : reg(r),
        field(frame_detail::axis_field<M>(f, axis)),
        dir(frame_detail::axis_dir(f, axis)) {}

  bool operator()(PointId a, PointId b) const {
    if (a == b) return false;
    if constexpr (M::is_exact) {
      // floating-point filter: decide when the approximations are separated
      // by more than the conversion error, fall back to exact otherwise
      const double da = reg->approx(field, a);
      const double db = reg->approx(field, b);
      const double diff = da - db;
      const double bound = (std::fabs(da) + std::fabs(db)) * 0x1p-50;
      if (diff > bound) return false;
      if (diff < -bound) return true;
    }
    const int c = scalar_cmp(reg->value(field, a), reg->value(field, b));
    if (c != 0) return c < 0;
    return dir > 0 ? a < b : a > b;
  }
};

// Frame-x motion of a square corner: the lower-left corner moves at -w/2,
// the upper-right at +w/2.
template <class M>
LinearMotion<M> corner_x_motion(const Registry<M>& reg, const Frame& f, PointId id, bool upper) {
  const typename M::Scalar& hw = reg.value(Registry<M>::kHalfW, id);
  return {frame_x(reg, f, id), upper ? hw : typename M::Scalar(-hw)};
}

// Corner x-coordinate at time t without materializing a motion.
template <class M>
typename M::Scalar corner_x_at(const Registry<M>& reg, const Frame& f, PointId id, bool upper,
                               const typename M::Scalar& t) {
  using S = typename M::Scalar;
  const S& x = frame_x(reg, f, id);
  const S& hw = reg.value(Registry<M>::kHalfW, id);
  return upper ? S(x + hw * t) : S(x - hw * t);
}

}  // namespace gsq
