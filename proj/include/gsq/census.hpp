#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gsq/wb_tree.hpp"

namespace gsq {

// Empirical verification of the dominance-link count bounds: build range
// trees on a red and a blue point set in d <= 3 dimensions, link a red node u
// and a blue node v exactly when each is canonical for the other's dominance
// query, and count.

enum class CensusDist : std::uint8_t { Uniform, Grid, Diagonal };

inline const char* to_string(CensusDist d) {
  switch (d) {
    case CensusDist::Uniform: return "uniform";
    case CensusDist::Grid: return "grid";
    default: return "diag";
  }
}

inline CensusDist census_dist_from(const std::string& s) {
  if (s == "uniform") return CensusDist::Uniform;
  if (s == "grid") return CensusDist::Grid;
  if (s == "diag" || s == "adversarial-diagonal") return CensusDist::Diagonal;
  throw input_error("unknown distribution: " + s);
}

struct CensusConfig {
  int d = 2;
  std::uint32_t n = 256, m = 256;
  CensusDist dist = CensusDist::Uniform;
  std::uint64_t seed = 1;
  std::uint32_t alpha_num = 1, alpha_den = 4;
};

struct CensusRow {
  CensusConfig cfg;
  std::uint64_t links = 0;
  std::uint32_t max_links_per_node = 0;
  double ratio = 0.0;
};

struct CensusPoint {
  double c[3] = {0, 0, 0};
};

struct CensusPl {
  NodeId next_root = kNil;
};

// One side: a static, perfectly balanced d-layer range tree. The analysis of
// the link bound is about tree shape, not kinetics, so trees here are bulk
// built and never mutated.
class CensusTree {
 public:
  int d = 2;
  bool max_dir = false;
  const std::vector<CensusPoint>* pts = nullptr;
  WbPool<CensusPl> layer[3];
  NodeId root = kNil;

  struct DimLess {
    const std::vector<CensusPoint>* pts;
    int dim;
    bool operator()(PointId a, PointId b) const {
      if (a == b) return false;
      const double ca = (*pts)[a].c[dim], cb = (*pts)[b].c[dim];
      if (ca != cb) return ca < cb;
      return a < b;
    }
  };
  DimLess less(int dim) const { return DimLess{pts, dim}; }

  void build(int dims, bool maxdir, const std::vector<CensusPoint>* points,
             std::vector<PointId> ids, std::uint32_t an, std::uint32_t ad) {
    d = dims;
    max_dir = maxdir;
    pts = points;
    for (int k = 0; k < 3; ++k) {
      layer[k].max_dir = maxdir;
      layer[k].alpha_num = an;
      layer[k].alpha_den = ad;
    }
    root = build_layer(0, std::move(ids));
  }

 private:
  NodeId build_layer(int k, std::vector<PointId> ids) {
    std::sort(ids.begin(), ids.end(), less(k));
    struct Hooks : NullHooks {
      CensusTree* t;
      int k;
      void assoc_build(NodeId n, BuildReason) {
        if (k + 1 >= t->d) return;
        t->layer[k][n].pl.next_root = t->build_layer(k + 1, t->layer[k].items_of(n));
      }
    } hk;
    hk.t = this;
    hk.k = k;
    return layer[k].bulk_build(ids.data(), static_cast<std::uint32_t>(ids.size()), hk);
  }
};

namespace census_detail {

// Enumerates every chain (one node per layer) of the tree, invoking
// f(chain[0..d-1]).
template <class F>
void walk_chains(const CensusTree& t, int k, NodeId n, NodeId* chain, const F& f) {
  t.layer[k].visit_nodes(n, [&](NodeId nd) {
    chain[k] = nd;
    if (k + 1 < t.d)
      walk_chains(t, k + 1, t.layer[k][nd].pl.next_root, chain, f);
    else
      f(chain);
  });
}

// Canonical decomposition of the dominance region given by `bounds` (one
// extreme leaf id per dimension), invoking f with the candidate chain.
template <class F>
void decompose(const CensusTree& t, int k, NodeId root, const PointId* bounds, NodeId* chain,
               std::vector<NodeId>* scratch, const F& f) {
  scratch[k].clear();
  t.layer[k].canonical(root, bounds[k], /*strict=*/false, t.less(k), scratch[k]);
  // deeper recursion only touches scratch[k+1..], so iterating in place is safe
  for (NodeId nd : scratch[k]) {
    chain[k] = nd;
    if (k + 1 < t.d)
      decompose(t, k + 1, t.layer[k][nd].pl.next_root, bounds, chain, scratch, f);
    else
      f(chain);
  }
}

}  // namespace census_detail

// Counts mutual dominance links between the red tree (queried for blues that
// dominate its boxes) and the blue tree. Also reports the maximum number of
// links attached to any single node on either side.
inline std::pair<std::uint64_t, std::uint32_t> count_links(const CensusTree& red,
                                                           const CensusTree& blue) {
  using namespace census_detail;
  std::uint64_t links = 0;
  std::uint32_t max_per_node = 0;
  std::vector<std::uint32_t> blue_count(blue.layer[blue.d - 1].capacity(), 0);
  if (red.root == kNil || blue.root == kNil) return {0, 0};

  NodeId uchain[3], vchain[3];
  PointId ubounds[3], vbounds[3];
  std::vector<NodeId> scratch[3];
  walk_chains(red, 0, red.root, uchain, [&](const NodeId* uc) {
    for (int k = 0; k < red.d; ++k) ubounds[k] = red.layer[k][uc[k]].extreme;
    std::uint32_t here = 0;
    decompose(blue, 0, blue.root, ubounds, vchain, scratch, [&](const NodeId* vc) {
      for (int k = 0; k < blue.d; ++k) vbounds[k] = blue.layer[k][vc[k]].extreme;
      for (int k = 0; k < red.d; ++k) {
        if (!red.layer[k].is_canonical_for(uc[k], vbounds[k], false, red.less(k))) return;
      }
      ++links;
      ++here;
      ++blue_count[vc[blue.d - 1]];
    });
    max_per_node = std::max(max_per_node, here);
  });
  for (std::uint32_t c : blue_count) max_per_node = std::max(max_per_node, c);
  return {links, max_per_node};
}

namespace census_detail {

struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::vector<CensusPoint> make_points(const CensusConfig& cfg, std::uint32_t count,
                                            bool blue_side) {
  std::vector<CensusPoint> out(count);
  SplitMix rng{cfg.seed * 2 + (blue_side ? 1 : 0)};
  switch (cfg.dist) {
    case CensusDist::Uniform:
      for (auto& p : out)
        for (int k = 0; k < cfg.d; ++k) p.c[k] = rng.real01();
      break;
    case CensusDist::Grid: {
      const std::uint32_t side =
          std::max<std::uint32_t>(1, static_cast<std::uint32_t>(
                                         std::ceil(std::pow(double(count), 1.0 / cfg.d))));
      for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t v = i;
        for (int k = 0; k < cfg.d; ++k) {
          out[i].c[k] = static_cast<double>(v % side) + (blue_side ? 0.5 : 0.0);
          v /= side;
        }
      }
      break;
    }
    case CensusDist::Diagonal:
      for (std::uint32_t i = 0; i < count; ++i)
        for (int k = 0; k < cfg.d; ++k)
          out[i].c[k] = 2.0 * i + (blue_side ? 1.0 : 0.0);
      break;
  }
  return out;
}

}  // namespace census_detail

inline CensusRow count_links(const CensusConfig& cfg) {
  GSQ_CHECK(cfg.d >= 1 && cfg.d <= 3, "census dimension must be 1..3");
  std::vector<CensusPoint> pts = census_detail::make_points(cfg, cfg.n, false);
  {
    const auto blues = census_detail::make_points(cfg, cfg.m, true);
    pts.insert(pts.end(), blues.begin(), blues.end());
  }
  std::vector<PointId> red_ids(cfg.n), blue_ids(cfg.m);
  for (std::uint32_t i = 0; i < cfg.n; ++i) red_ids[i] = i;
  for (std::uint32_t i = 0; i < cfg.m; ++i) blue_ids[i] = cfg.n + i;

  CensusTree red, blue;
  red.build(cfg.d, /*max_dir=*/true, &pts, red_ids, cfg.alpha_num, cfg.alpha_den);
  blue.build(cfg.d, /*max_dir=*/false, &pts, blue_ids, cfg.alpha_num, cfg.alpha_den);

  CensusRow row;
  row.cfg = cfg;
  const auto [links, maxn] = count_links(red, blue);
  row.links = links;
  row.max_links_per_node = maxn;
  if (cfg.d == 1) {
    row.ratio = static_cast<double>(links) / (static_cast<double>(cfg.n) + cfg.m);
  } else {
    const double lg = std::log2(static_cast<double>(cfg.n));
    const double denom =
        static_cast<double>(cfg.n) * std::pow(lg * std::log2(lg), cfg.d - 1);
    row.ratio = static_cast<double>(links) / denom;
  }
  return row;
}

inline std::string census_csv_header() {
  return "d,n,m,dist,seed,alpha,links,max_links_per_node,ratio";
}

inline std::string to_csv(const CensusRow& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", r.ratio);
  const double alpha =
      static_cast<double>(r.cfg.alpha_num) / static_cast<double>(r.cfg.alpha_den);
  char abuf[32];
  std::snprintf(abuf, sizeof(abuf), "%g", alpha);
  return std::to_string(r.cfg.d) + "," + std::to_string(r.cfg.n) + "," +
         std::to_string(r.cfg.m) + "," + to_string(r.cfg.dist) + "," +
         std::to_string(r.cfg.seed) + "," + abuf + "," + std::to_string(r.links) + "," +
         std::to_string(r.max_links_per_node) + "," + buf;
}

}  // namespace gsq
