#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <vector>

#include "gsq/census.hpp"
#include "helpers.hpp"

using namespace gsq;
using gsqtest::Rng;

namespace {

using Chain = std::array<NodeId, 3>;

Chain chain_of(const NodeId* c, int d) {
  Chain out{kNil, kNil, kNil};
  for (int k = 0; k < d; ++k) out[k] = c[k];
  return out;
}

// Membership by definition: the node's leaf set lies inside the one-sided
// interval and its parent's does not. Scans leaf subsets; no shared code with
// the O(1) test it cross-checks.
bool member_by_def(const CensusTree& t, int k, NodeId n, PointId bound) {
  auto all_inside = [&](NodeId nd) {
    for (PointId i : t.layer[k].items_of(nd)) {
      const bool in = t.max_dir ? !t.less(k)(bound, i) : !t.less(k)(i, bound);
      if (!in) return false;
    }
    return true;
  };
  if (!all_inside(n)) return false;
  const NodeId p = t.layer[k][n].parent;
  return p == kNil || !all_inside(p);
}

std::set<std::pair<Chain, Chain>> brute_links(const CensusTree& red, const CensusTree& blue) {
  std::set<std::pair<Chain, Chain>> out;
  std::vector<Chain> reds, blues;
  NodeId buf[3];
  census_detail::walk_chains(red, 0, red.root, buf,
                             [&](const NodeId* c) { reds.push_back(chain_of(c, red.d)); });
  census_detail::walk_chains(blue, 0, blue.root, buf,
                             [&](const NodeId* c) { blues.push_back(chain_of(c, blue.d)); });
  for (const Chain& u : reds) {
    for (const Chain& v : blues) {
      bool ok = true;
      for (int k = 0; ok && k < red.d; ++k) {
        // blue node canonical for the red chain's max corner, and vice versa
        ok = member_by_def(blue, k, v[k], red.layer[k][u[k]].extreme) &&
             member_by_def(red, k, u[k], blue.layer[k][v[k]].extreme);
      }
      if (ok) out.insert({u, v});
    }
  }
  return out;
}

std::pair<CensusTree, CensusTree> build_pair(const std::vector<CensusPoint>& pts,
                                             std::uint32_t n_red, int d) {
  std::vector<PointId> reds, blues;
  for (PointId i = 0; i < n_red; ++i) reds.push_back(i);
  for (PointId i = n_red; i < pts.size(); ++i) blues.push_back(i);
  std::pair<CensusTree, CensusTree> out;
  out.first.build(d, true, &pts, reds, 1, 4);
  out.second.build(d, false, &pts, blues, 1, 4);
  return out;
}

}  // namespace

TEST_CASE("two singleton trees link iff the blue point dominates the red") {
  std::vector<CensusPoint> pts(2);
  pts[0].c[0] = 1.0;  // red
  pts[1].c[0] = 2.0;  // blue
  auto [red, blue] = build_pair(pts, 1, 1);
  CHECK(count_links(red, blue).first == 1);

  // all reds above all blues: the dominating region is empty
  std::vector<CensusPoint> sep(8);
  for (int i = 0; i < 4; ++i) sep[i].c[0] = 100.0 + i;      // reds
  for (int i = 4; i < 8; ++i) sep[i].c[0] = i - 4.0;        // blues
  auto [red2, blue2] = build_pair(sep, 4, 1);
  CHECK(count_links(red2, blue2).first == 0);
}

TEST_CASE("link counts equal brute-force mutual membership in 1..3 dimensions") {
  Rng rng(601);
  for (int d = 1; d <= 3; ++d) {
    for (int round = 0; round < 8; ++round) {
      const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(64));
      const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(64));
      std::vector<CensusPoint> pts(n + m);
      for (auto& p : pts)
        for (int k = 0; k < d; ++k) p.c[k] = static_cast<double>(rng.below(32));
      auto [red, blue] = build_pair(pts, n, d);
      const auto want = brute_links(red, blue);
      const auto got = count_links(red, blue);
      CHECK(got.first == want.size());
      // per-node maximum from the brute set
      std::map<Chain, std::uint32_t> per;
      std::uint32_t best = 0;
      for (const auto& [u, v] : want) {
        best = std::max(best, ++per[u]);
        Chain vk = v;
        vk[2] = vk[2] ^ 0x80000000u;  // disambiguate sides
        best = std::max(best, ++per[vk]);
      }
      CHECK(got.second == best);
    }
  }
}

TEST_CASE("every cross dominance pair is covered by some link") {
  Rng rng(603);
  for (int d = 1; d <= 3; ++d) {
    for (int round = 0; round < 5; ++round) {
      const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(32));
      const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(32));
      std::vector<CensusPoint> pts(n + m);
      for (auto& p : pts)
        for (int k = 0; k < d; ++k) p.c[k] = static_cast<double>(rng.below(16));
      auto [red, blue] = build_pair(pts, n, d);
      const auto links = brute_links(red, blue);
      for (PointId r = 0; r < n; ++r) {
        for (PointId b = n; b < n + m; ++b) {
          bool dominated = true;
          for (int k = 0; k < d; ++k) dominated = dominated && red.less(k)(r, b);
          if (!dominated) continue;
          bool covered = false;
          for (const auto& [u, v] : links) {
            if (covered) break;
            auto ritems = red.layer[d - 1].items_of(u[d - 1]);
            auto bitems = blue.layer[d - 1].items_of(v[d - 1]);
            covered = std::count(ritems.begin(), ritems.end(), r) > 0 &&
                      std::count(bitems.begin(), bitems.end(), b) > 0;
          }
          CHECK(covered);
        }
      }
    }
  }
}

TEST_CASE("census rows are reproducible and ratios sane") {
  CensusConfig cfg;
  cfg.d = 2;
  cfg.n = cfg.m = 512;
  cfg.seed = 7;
  const CensusRow a = count_links(cfg);
  const CensusRow b = count_links(cfg);
  CHECK(a.links == b.links);
  CHECK(a.max_links_per_node == b.max_links_per_node);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.links > 0);
  CHECK(a.ratio > 0.0);

  for (auto dist : {CensusDist::Grid, CensusDist::Diagonal}) {
    CensusConfig c2 = cfg;
    c2.dist = dist;
    c2.n = c2.m = 128;
    const CensusRow r = count_links(c2);
    CHECK(r.links > 0);
  }
}
