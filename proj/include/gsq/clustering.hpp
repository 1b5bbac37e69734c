#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <queue>
#include <vector>

#include "gsq/engine.hpp"

namespace gsq {

template <class M>
struct MergeEvent {
  typename M::Scalar time{};
  PointId left = kNoPoint, right = kNoPoint, result = kNoPoint;
  typename M::Scalar x{}, y{}, w{};
};

// The output merge forest: input points as leaves, one binary merge event per
// internal node, and the clusters alive at the horizon as roots.
template <class M>
struct Dendrogram {
  std::vector<WeightedPoint<M>> leaves;
  std::vector<MergeEvent<M>> merges;
  std::vector<PointId> roots;

  friend bool operator==(const Dendrogram& a, const Dendrogram& b) {
    auto peq = [](const WeightedPoint<M>& p, const WeightedPoint<M>& q) {
      return p.id == q.id && scalar_cmp(p.x, q.x) == 0 && scalar_cmp(p.y, q.y) == 0 &&
             scalar_cmp(p.w, q.w) == 0;
    };
    auto meq = [](const MergeEvent<M>& p, const MergeEvent<M>& q) {
      return p.left == q.left && p.right == q.right && p.result == q.result &&
             scalar_cmp(p.time, q.time) == 0 && scalar_cmp(p.x, q.x) == 0 &&
             scalar_cmp(p.y, q.y) == 0 && scalar_cmp(p.w, q.w) == 0;
    };
    if (a.leaves.size() != b.leaves.size() || a.merges.size() != b.merges.size() ||
        a.roots != b.roots)
      return false;
    for (std::size_t i = 0; i < a.leaves.size(); ++i)
      if (!peq(a.leaves[i], b.leaves[i])) return false;
    for (std::size_t i = 0; i < a.merges.size(); ++i)
      if (!meq(a.merges[i], b.merges[i])) return false;
    return true;
  }
};

// First point of divergence between two dendrograms, for oracle reports.
template <class M>
std::string first_divergence(const Dendrogram<M>& got, const Dendrogram<M>& want) {
  if (got.leaves.size() != want.leaves.size()) return "leaf count differs";
  const std::size_t n = std::min(got.merges.size(), want.merges.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = got.merges[i];
    const auto& w = want.merges[i];
    if (g.left != w.left || g.right != w.right || scalar_cmp(g.time, w.time) != 0 ||
        scalar_cmp(g.x, w.x) != 0 || scalar_cmp(g.y, w.y) != 0 || scalar_cmp(g.w, w.w) != 0) {
      return "merge " + std::to_string(i) + ": got (" + std::to_string(g.left) + "," +
             std::to_string(g.right) + ") t=" + scalar_to_string(g.time) + ", want (" +
             std::to_string(w.left) + "," + std::to_string(w.right) +
             ") t=" + scalar_to_string(w.time);
    }
  }
  if (got.merges.size() != want.merges.size()) return "merge count differs";
  if (got.roots != want.roots) return "roots differ";
  return "";
}

namespace detail {

// Shared merge bookkeeping so the engine-backed simulation and the
// brute-force oracle apply bit-identical rules: merge the least tied pair,
// then cascade-merge (least id first) while the new square overlaps anything.
template <class M>
struct DendroBuilder {
  Dendrogram<M> dendro;
  PointId next_id;

  explicit DendroBuilder(const std::vector<WeightedPoint<M>>& pts) {
    dendro.leaves = pts;
    PointId top = 0;
    for (const auto& p : pts) top = std::max(top, p.id);
    next_id = pts.empty() ? 0 : top + 1;
  }

  WeightedPoint<M> record(const typename M::Scalar& t, const WeightedPoint<M>& a,
                          const WeightedPoint<M>& b) {
    WeightedPoint<M> z = merge(a, b, next_id++);
    dendro.merges.push_back(MergeEvent<M>{t, a.id, b.id, z.id, z.x, z.y, z.w});
    return z;
  }
};

}  // namespace detail

// Agglomerative clustering by event-driven simulation: grow, detect the first
// intersection, merge the pair (cascading while the merged square overlaps
// anything), re-insert, repeat until one cluster or the horizon.
template <class M>
Dendrogram<M> cluster(const std::vector<WeightedPoint<M>>& points,
                      const std::optional<typename M::Scalar>& horizon = std::nullopt,
                      EngineConfig cfg = {}, RunStats* stats_out = nullptr) {
  using S = typename M::Scalar;
  const auto t0 = std::chrono::steady_clock::now();
  detail::DendroBuilder<M> b(points);
  Engine<M> engine(points, cfg);
  while (engine.live_count() > 1) {
    auto ev = engine.advance_to_next_event(horizon);
    if (!ev) break;
    const S t = ev->time;
    WeightedPoint<M> pa = engine.registry().point(std::min(ev->a, ev->b));
    WeightedPoint<M> pb = engine.registry().point(std::max(ev->a, ev->b));
    engine.erase(pa.id);
    engine.erase(pb.id);
    WeightedPoint<M> z = b.record(t, pa, pb);
    for (;;) {
      const PointId r = engine.intersects_query(z.x, z.y, z.w, t);
      if (r == kNoPoint) break;
      const WeightedPoint<M> pr = engine.registry().point(r);
      engine.erase(r);
      z = b.record(t, z, pr);
    }
    engine.insert(z);
  }
  b.dendro.roots = engine.live_ids();
  if (stats_out) {
    *stats_out = engine.stats();
    stats_out->n = points.size();
    stats_out->wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return b.dendro;
}

// Quadratic-time oracle: all pairwise intersection times in a heap, identical
// merge, cascade, and tie rules. Ground truth for the simulation.
template <class M>
Dendrogram<M> brute_cluster(const std::vector<WeightedPoint<M>>& points,
                            const std::optional<typename M::Scalar>& horizon = std::nullopt) {
  using S = typename M::Scalar;
  detail::DendroBuilder<M> b(points);

  struct PairEntry {
    S t{};
    PointId a = kNoPoint, b = kNoPoint;
    bool operator>(const PairEntry& o) const {
      const int c = scalar_cmp(t, o.t);
      if (c != 0) return c > 0;
      if (a != o.a) return a > o.a;
      return b > o.b;
    }
  };
  std::priority_queue<PairEntry, std::vector<PairEntry>, std::greater<PairEntry>> heap;
  std::vector<WeightedPoint<M>> alive = points;
  std::sort(alive.begin(), alive.end(),
            [](const WeightedPoint<M>& p, const WeightedPoint<M>& q) { return p.id < q.id; });

  auto is_alive = [&](PointId id) {
    for (const auto& p : alive)
      if (p.id == id) return true;
    return false;
  };
  auto get = [&](PointId id) -> const WeightedPoint<M>& {
    for (const auto& p : alive)
      if (p.id == id) return p;
    throw invariant_error("brute_cluster: dead id");
  };
  auto drop = [&](PointId id) {
    alive.erase(std::remove_if(alive.begin(), alive.end(),
                               [&](const WeightedPoint<M>& p) { return p.id == id; }),
                alive.end());
  };
  auto push_pairs = [&](const WeightedPoint<M>& z) {
    for (const auto& p : alive) {
      if (p.id == z.id) continue;
      heap.push(PairEntry{pairwise_intersection_time<M>(p, z), std::min(p.id, z.id),
                          std::max(p.id, z.id)});
    }
  };
  for (std::size_t i = 0; i < alive.size(); ++i)
    for (std::size_t j = i + 1; j < alive.size(); ++j)
      heap.push(PairEntry{pairwise_intersection_time<M>(alive[i], alive[j]),
                          std::min(alive[i].id, alive[j].id), std::max(alive[i].id, alive[j].id)});

  while (!heap.empty() && alive.size() > 1) {
    const PairEntry e = heap.top();
    heap.pop();
    if (!is_alive(e.a) || !is_alive(e.b)) continue;
    if (horizon && scalar_cmp(e.t, *horizon) > 0) break;
    WeightedPoint<M> pa = get(e.a);
    WeightedPoint<M> pb = get(e.b);
    drop(e.a);
    drop(e.b);
    WeightedPoint<M> z = b.record(e.t, pa, pb);
    for (;;) {
      PointId r = kNoPoint;
      for (const auto& p : alive) {
        if (squares_intersect_at<M>(z, p, e.t) && (r == kNoPoint || p.id < r)) r = p.id;
      }
      if (r == kNoPoint) break;
      const WeightedPoint<M> pr = get(r);
      drop(r);
      z = b.record(e.t, z, pr);
    }
    push_pairs(z);
    alive.push_back(z);
  }
  std::sort(alive.begin(), alive.end(),
            [](const WeightedPoint<M>& p, const WeightedPoint<M>& q) { return p.id < q.id; });
  for (const auto& p : alive) b.dendro.roots.push_back(p.id);
  return b.dendro;
}

}  // namespace gsq
