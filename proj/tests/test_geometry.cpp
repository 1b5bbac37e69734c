#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "gsq/geometry.hpp"
#include "helpers.hpp"

using namespace gsq;
using gsqtest::Rng;

namespace {

// Independent overlap predicate: explicit corner intervals, no shared code
// with pairwise_intersection_time.
template <class M>
bool rect_overlap(const WeightedPoint<M>& p, const WeightedPoint<M>& q,
                  const typename M::Scalar& t) {
  using S = typename M::Scalar;
  const S plx = p.x - t * p.w / 2, phx = p.x + t * p.w / 2;
  const S ply = p.y - t * p.w / 2, phy = p.y + t * p.w / 2;
  const S qlx = q.x - t * q.w / 2, qhx = q.x + t * q.w / 2;
  const S qly = q.y - t * q.w / 2, qhy = q.y + t * q.w / 2;
  const bool x_overlap = scalar_cmp(plx, qhx) <= 0 && scalar_cmp(qlx, phx) <= 0;
  const bool y_overlap = scalar_cmp(ply, qhy) <= 0 && scalar_cmp(qly, phy) <= 0;
  return x_overlap && y_overlap;
}

// Bisection on the overlap predicate; the oracle that pinned the expected
// values of the intersection-time examples.
double bisect_first_overlap(const WeightedPoint<FloatMode>& p, const WeightedPoint<FloatMode>& q) {
  double lo = 0.0, hi = 1.0;
  while (!rect_overlap(p, q, hi)) hi *= 2;
  if (rect_overlap(p, q, lo)) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (rect_overlap(p, q, mid) ? hi : lo) = mid;
  }
  return hi;
}

WeightedPoint<FloatMode> fp(PointId id, double x, double y, double w) { return {id, x, y, w}; }
WeightedPoint<ExactMode> ep(PointId id, long x, long y, long w) {
  return {id, mpq_class(x), mpq_class(y), mpq_class(w)};
}

}  // namespace

TEST_CASE("corner motions of the growing square") {
  auto m = corner_motion(fp(0, 0, 0, 2), CornerKind::LowerLeft, Axis::X);
  CHECK(m.a == 0.0);
  CHECK(m.b == -1.0);
  CHECK(m.at(3.0) == -3.0);

  m = corner_motion(fp(1, 5, 1, 4), CornerKind::UpperRight, Axis::Y);
  CHECK(m.a == 1.0);
  CHECK(m.b == 2.0);
  CHECK(m.at(1.0) == 3.0);

  // at t = 0 every corner coincides with the center
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto p = fp(0, rng.real01() * 100, rng.real01() * 100, 1 + rng.real01() * 10);
    for (auto c : {CornerKind::LowerLeft, CornerKind::UpperRight}) {
      CHECK(corner_motion(p, c, Axis::X).at(0.0) == p.x);
      CHECK(corner_motion(p, c, Axis::Y).at(0.0) == p.y);
    }
  }
}

TEST_CASE("gamma projection is time-invariant and id-tiebroken") {
  CHECK(gamma_key(fp(0, 0, 0, 1)).value == 0.0);
  CHECK(gamma_key(fp(0, 1, 2, 1)) < gamma_key(fp(1, 2, 1, 1)));

  // corner projections equal the center projection at all times
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    auto p = fp(3, rng.real01() * 10, rng.real01() * 10, 1 + rng.real01() * 5);
    const double t = rng.real01() * 9;
    for (auto c : {CornerKind::LowerLeft, CornerKind::UpperRight}) {
      const double gx = corner_motion(p, c, Axis::X).at(t) - corner_motion(p, c, Axis::Y).at(t);
      CHECK(gx == doctest::Approx(gamma_key(p).value).epsilon(1e-12));
    }
  }

  // equal projections fall back to id
  CHECK(gamma_key(fp(0, 5, 5, 1)) < gamma_key(fp(1, 7, 7, 1)));
  CHECK(cmp(gamma_key(fp(2, 5, 5, 1)), gamma_key(fp(2, 5, 5, 1))) == 0);
}

TEST_CASE("dominance and its gamma split") {
  CHECK(dominates(fp(0, 2, 3, 1), fp(1, 1, 1, 1)));
  CHECK(!dominates(fp(0, 1, 1, 1), fp(1, 2, 3, 1)));
  CHECK(!dominates(fp(0, 1, 3, 1), fp(1, 2, 1, 1)));

  CHECK(classify(fp(0, 1, 5, 1), fp(1, 0, 0, 1)) == DominanceClass::DMinus);
  CHECK(classify(fp(0, 5, 1, 1), fp(1, 0, 0, 1)) == DominanceClass::DPlus);
  CHECK(classify(fp(0, 0, 5, 1), fp(1, 1, 0, 1)) == DominanceClass::NotDominating);

  // antisymmetry under perturbed comparison, including tied coordinates
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    auto p = fp(0, rng.range(0, 6), rng.range(0, 6), 1);
    auto q = fp(1, rng.range(0, 6), rng.range(0, 6), 1);
    if (dominates(p, q)) CHECK(!dominates(q, p));
    if (classify(p, q) != DominanceClass::NotDominating)
      CHECK((classify(p, q) == DominanceClass::DMinus) ==
            (gamma_key(p) < gamma_key(q)));
  }
}

TEST_CASE("pairwise intersection time matches the bisection oracle") {
  // frozen oracle values
  CHECK(pairwise_intersection_time<FloatMode>(fp(0, 3, 0, 1), fp(1, 0, 0, 2)) == 2.0);
  CHECK(pairwise_intersection_time<FloatMode>(fp(0, 4, 1, 2), fp(1, 0, 0, 2)) == 2.0);
  CHECK(pairwise_intersection_time<FloatMode>(fp(0, 0, 0, 1), fp(1, 0, 0, 1)) == 0.0);

  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    auto p = fp(0, rng.range(0, 50), rng.range(0, 50), rng.range(1, 9));
    auto q = fp(1, rng.range(0, 50), rng.range(0, 50), rng.range(1, 9));
    const double closed = pairwise_intersection_time<FloatMode>(p, q);
    const double oracle = bisect_first_overlap(p, q);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-9));
    // rejection sampling against the direct overlap predicate
    for (int k = 0; k < 20; ++k) {
      const double t = rng.real01() * 40;
      CHECK(rect_overlap(p, q, t) == (t >= closed));
    }
  }
}

TEST_CASE("exact intersection times are exact") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    auto p = ep(0, rng.range(0, 1000), rng.range(0, 1000), rng.range(1, 50));
    auto q = ep(1, rng.range(0, 1000), rng.range(0, 1000), rng.range(1, 50));
    const mpq_class t = pairwise_intersection_time<ExactMode>(p, q);
    CHECK(rect_overlap(p, q, t));
    if (t > 0) {
      const mpq_class eps(1, 1000000000);
      CHECK(!rect_overlap(p, q, mpq_class(t - eps)));
    }
  }
}

TEST_CASE("merge replaces two squares by their weighted combination") {
  auto z = merge(ep(0, 0, 0, 1), ep(1, 2, 2, 3), 2);
  CHECK(z.id == 2);
  CHECK(z.x == mpq_class(3, 2));
  CHECK(z.y == mpq_class(3, 2));
  CHECK(z.w == 4);

  z = merge(ep(0, 5, 5, 1), ep(1, 5, 5, 1), 2);
  CHECK(z.x == 5);
  CHECK(z.y == 5);
  CHECK(z.w == 2);

  z = merge(ep(0, 0, 0, 3), ep(1, 4, 0, 1), 2);
  CHECK(z.x == 1);
  CHECK(z.y == 0);
  CHECK(z.w == 4);

  // weight conservation and collinearity
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    auto p = ep(0, rng.range(-50, 50), rng.range(-50, 50), rng.range(1, 20));
    auto q = ep(1, rng.range(-50, 50), rng.range(-50, 50), rng.range(1, 20));
    auto m = merge(p, q, 2);
    CHECK(m.w == p.w + q.w);
    // z - q parallel to p - q
    const mpq_class cross = (m.x - q.x) * (p.y - q.y) - (m.y - q.y) * (p.x - q.x);
    CHECK(cross == 0);
    // z between p and q on both axes
    CHECK(scalar_cmp(mpq_class((m.x - p.x) * (m.x - q.x)), mpq_class(0)) <= 0);
    CHECK(scalar_cmp(mpq_class((m.y - p.y) * (m.y - q.y)), mpq_class(0)) <= 0);
  }
}

TEST_CASE("first dominating square to arrive carries the extreme corner") {
  // Among dominators before q along gamma, the first to reach the square
  // comes in through the top edge with the lowest lower-left corner, and
  // symmetrically for the ones after q (right edge, leftmost corner).
  Rng rng(29);
  for (int iter = 0; iter < 100; ++iter) {
    auto q = ep(0, rng.range(40, 60), rng.range(40, 60), rng.range(1, 9));
    std::vector<WeightedPoint<ExactMode>> dplus, dminus;
    for (PointId id = 1; id <= 12; ++id) {
      auto p = ep(id, rng.range(40, 100), rng.range(40, 100), rng.range(1, 9));
      if (!dominates(p, q)) continue;
      (classify(p, q) == DominanceClass::DPlus ? dplus : dminus).push_back(p);
    }
    auto first_of = [&](const std::vector<WeightedPoint<ExactMode>>& group, Axis axis) {
      if (group.empty()) return;
      const WeightedPoint<ExactMode>* best = &group[0];
      mpq_class best_t = pairwise_intersection_time<ExactMode>(group[0], q);
      for (const auto& p : group) {
        const mpq_class t = pairwise_intersection_time<ExactMode>(p, q);
        if (t < best_t) {
          best_t = t;
          best = &p;
        }
      }
      // best's lower-left corner is extreme on the contact axis at best_t
      const mpq_class bv = corner_motion(*best, CornerKind::LowerLeft, axis).at(best_t);
      for (const auto& p : group) {
        const mpq_class pv = corner_motion(p, CornerKind::LowerLeft, axis).at(best_t);
        CHECK(scalar_cmp(bv, pv) <= 0);
      }
    };
    first_of(dminus, Axis::Y);
    first_of(dplus, Axis::X);
  }
}
