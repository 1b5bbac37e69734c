#pragma once

#include <cstdint>
#include <vector>

#include "gsq/geometry.hpp"

namespace gsqtest {

// splitmix64; platform-independent so seeded tests reproduce everywhere.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

template <class M>
std::vector<gsq::WeightedPoint<M>> random_points(Rng& rng, std::size_t n,
                                                 std::int64_t coord_max = 1000000,
                                                 std::int64_t weight_max = 10000) {
  std::vector<gsq::WeightedPoint<M>> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsq::WeightedPoint<M> p;
    p.id = static_cast<gsq::PointId>(i);
    p.x = typename M::Scalar(rng.range(0, coord_max));
    p.y = typename M::Scalar(rng.range(0, coord_max));
    p.w = typename M::Scalar(rng.range(1, weight_max));
    pts.push_back(p);
  }
  return pts;
}

}  // namespace gsqtest
