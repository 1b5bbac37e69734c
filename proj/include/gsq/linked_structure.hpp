#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "gsq/kinetic_tournament.hpp"

namespace gsq {

struct PrimaryPl {
  NodeId sec_root = kNil;
};
struct SecondaryPl {
  NodeId tern_root = kNil;
  NodeId owner_u = kNil;
};

// A linking certificate between a tournament node w of the lower-left tree
// and a node z of the upper-right tree. It exists exactly when each node is
// canonical for the other's query point, and asserts that the upper-right
// winner stays left of the lower-left winner. Records sit in two intrusive
// lists, one per endpoint.
struct LinkRec {
  NodeId w = kNil;  // node in the lower-left tree
  NodeId z = kNil;  // node in the upper-right tree
  QueueHandle cert;
  std::uint32_t next_w = kNilLink, prev_w = kNilLink;
  std::uint32_t next_z = kNilLink, prev_z = kNilLink;
};

class LinkPool {
 public:
  LinkRec& operator[](std::uint32_t i) { return recs_[i]; }
  const LinkRec& operator[](std::uint32_t i) const { return recs_[i]; }
  std::uint32_t alloc() {
    if (!free_.empty()) {
      const std::uint32_t i = free_.back();
      free_.pop_back();
      recs_[i] = LinkRec{};
      return i;
    }
    recs_.emplace_back();
    return static_cast<std::uint32_t>(recs_.size() - 1);
  }
  void dealloc(std::uint32_t i) {
    recs_[i].w = kNil;
    free_.push_back(i);
  }
  std::size_t live() const { return recs_.size() - free_.size(); }

 private:
  std::vector<LinkRec> recs_;
  std::vector<std::uint32_t> free_;
};

// One side of a structure instance: a three-layer range tree (x -> y ->
// gamma) over the centers, whose ternary layer is a kinetic tournament on
// corner coordinates. The lower side tracks minima of lower-left corners,
// the upper side maxima of upper-right corners; summaries point the same way.
template <class M>
struct TreeSide {
  bool upper = false;
  NodeId root = kNil;
  WbPool<PrimaryPl> prim;
  WbPool<SecondaryPl> sec;
  WbPool<TernaryPl> tern;
};

struct StructureConfig {
  std::uint32_t alpha_num = 1, alpha_den = 4;
  double eps = 0.0;
};

struct StructureStats {
  std::uint64_t tournament_events = 0;
  std::uint64_t link_refreshes = 0;
};

// The half data structure of one quadrant frame: detects the first
// intersection among pairs where the dominating point follows the dominated
// one along gamma (the "after" half; the mirror half is the same structure in
// a swapped frame). Updates keep the linking-certificate set exactly equal to
// the mutual-membership rule: besides the nodes the update itself touches, we
// refresh every tournament node whose membership-test inputs (subtree
// extremes of its chain, or its parents') changed, which the tree layers
// report through a drift log.
template <class M>
class LinkedStructure {
 public:
  using S = typename M::Scalar;

  LinkedStructure(const Registry<M>* reg, Frame frame, StructureConfig cfg)
      : reg_(reg), frame_(frame), cfg_(cfg) {
    for (int s = 0; s < 2; ++s) {
      sides_[s].upper = s == 1;
      sides_[s].prim.max_dir = s == 1;
      sides_[s].sec.max_dir = s == 1;
      sides_[s].tern.max_dir = s == 1;
      sides_[s].prim.alpha_num = cfg.alpha_num;
      sides_[s].prim.alpha_den = cfg.alpha_den;
      sides_[s].sec.alpha_num = cfg.alpha_num;
      sides_[s].sec.alpha_den = cfg.alpha_den;
      sides_[s].tern.alpha_num = cfg.alpha_num;
      sides_[s].tern.alpha_den = cfg.alpha_den;
    }
  }

  const Frame& frame() const { return frame_; }
  EventQueue<M>& tournament_queue() { return tournament_q_; }
  EventQueue<M>& linking_queue() { return linking_q_; }
  const EventQueue<M>& tournament_queue() const { return tournament_q_; }
  const EventQueue<M>& linking_queue() const { return linking_q_; }
  TreeSide<M>& side(int s) { return sides_[s]; }
  const TreeSide<M>& side(int s) const { return sides_[s]; }
  const LinkPool& links() const { return links_; }
  LinkPool& links() { return links_; }
  const StructureStats& stats() const { return stats_; }

  KeyLess<M> key_less(FrameAxis axis) const { return KeyLess<M>{reg_, frame_, axis}; }
  TournCtx<M> tourn_ctx(int s) const {
    return TournCtx<M>(reg_, frame_, sides_[s].upper, cfg_.eps, static_cast<std::uint8_t>(s));
  }

  void build(std::vector<PointId> ids, const S& now) {
    begin_update();
    for (int s = 0; s < 2; ++s) {
      std::sort(ids.begin(), ids.end(), key_less(FrameAxis::X));
      PrimaryHooks hk{{}, this, s, &now};
      sides_[s].root =
          sides_[s].prim.bulk_build(ids.data(), static_cast<std::uint32_t>(ids.size()), hk);
    }
    end_update(now);
  }

  void insert(PointId p, const S& now) {
    begin_update();
    for (int s = 0; s < 2; ++s) {
      PrimaryHooks hk{{}, this, s, &now};
      sides_[s].prim.insert(sides_[s].root, p, key_less(FrameAxis::X), hk);
    }
    end_update(now);
  }

  void erase(PointId p, const S& now) {
    begin_update();
    for (int s = 0; s < 2; ++s) {
      PrimaryHooks hk{{}, this, s, &now};
      sides_[s].prim.erase(sides_[s].root, p, key_less(FrameAxis::X), hk);
    }
    end_update(now);
  }

  // Processes the top tournament certificate (must fail at its scheduled
  // time); winner changes propagate upward and retime the affected nodes'
  // linking certificates.
  void process_tournament_event() {
    GSQ_CHECK(!tournament_q_.empty(), "process_tournament_event: no event");
    const QueueHandle top = tournament_q_.top_handle();
    const Certificate<M> cert = tournament_q_.pop();
    const int s = cert.owner.side;
    const NodeId n = cert.owner.node;
    TreeSide<M>& side = sides_[s];
    GSQ_CHECK(side.tern[n].alive(), "tournament event on dead node");
    GSQ_CHECK(side.tern[n].pl.cert.slot == top.slot && side.tern[n].pl.cert.gen == top.gen,
              "tournament event does not match node bookkeeping");
    side.tern[n].pl.cert = QueueHandle::none();
    const S now = cert.failure.value;
    winner_scratch_.clear();
    tourn_handle_failure(side.tern, n, tourn_ctx(s), tournament_q_, now, winner_scratch_);
    for (NodeId w : winner_scratch_) retime_links(s, w, now);
    ++stats_.tournament_events;
  }

  // Minimum linking-certificate failure time and the winner pair stored on
  // it; +infinity sentinel when no link exists. Tournament failures with
  // earlier times are processed first (they never constitute intersections).
  struct Failure {
    Time<M> time;
    PointId a = kNoPoint, b = kNoPoint;
  };
  Failure first_failure() {
    for (;;) {
      const Time<M> lt =
          linking_q_.empty() ? Time<M>::inf() : linking_q_.top().failure;
      if (!tournament_q_.empty() && tournament_q_.top().failure <= lt) {
        process_tournament_event();
        continue;
      }
      if (lt.is_inf()) return Failure{Time<M>::inf(), kNoPoint, kNoPoint};
      const Certificate<M>& c = linking_q_.top();
      return Failure{c.failure, c.lhs_id, c.rhs_id};
    }
  }

  // Recomputes every node's link set from scratch; idempotent on a
  // consistent structure.
  void refresh_all_links(const S& now) {
    for (int s = 0; s < 2; ++s) {
      std::vector<std::pair<int, NodeId>> all;
      for_each_tern(s, [&](NodeId n) { all.emplace_back(s, n); });
      for (const auto& [ss, n] : all) refresh_links(ss, n, now);
    }
  }

  // --- queries ----------------------------------------------------------

  // Visits the canonical tournament nodes representing, for side 0, the
  // dominators of the query that follow it along gamma, and for side 1 the
  // dominated points that precede it. The query point must be staged in the
  // registry under kQueryId. Visitor: bool(side, NodeId) -> keep descending?
  template <class Visit>
  void visit_query_nodes(int s, Visit&& visit) const {
    const TreeSide<M>& side = sides_[s];
    if (side.root == kNil) return;
    const bool st = true;  // strict bounds: the query is never stored
    const auto lx = key_less(FrameAxis::X);
    const auto ly = key_less(FrameAxis::Y);
    const auto lg = key_less(FrameAxis::Gamma);
    side.prim.canonical_visit(side.root, kQueryId, st, lx, [&](NodeId u) {
      side.sec.canonical_visit(side.prim[u].pl.sec_root, kQueryId, st, ly, [&](NodeId v) {
        side.tern.canonical_visit(side.sec[v].pl.tern_root, kQueryId, st, lg,
                                  [&](NodeId w) { visit(w); });
      });
    });
  }

  // Does the winner corner stored at node n cross the query's opposite
  // corner at time t? strict=false uses closed comparison (boundary contact
  // intersects), strict=true detects proper overlap only.
  bool node_witnesses(int s, NodeId n, const S& t, bool strict) const {
    const TreeSide<M>& side = sides_[s];
    const PointId win = side.tern[n].pl.winner;
    const LinearMotion<M> wm = corner_x_motion(*reg_, frame_, win, side.upper);
    const LinearMotion<M> qm = corner_x_motion(*reg_, frame_, kQueryId, !side.upper);
    const int c = scalar_cmp(wm.at(t), qm.at(t));
    if (s == 0) return strict ? c < 0 : c <= 0;  // min lower-left vs query upper-right
    return strict ? c > 0 : c >= 0;              // max upper-right vs query lower-left
  }

  // Any intersecting witness, or kNoPoint. Query staged under kQueryId.
  PointId query_any_witness(const S& t, bool strict) const {
    PointId hit = kNoPoint;
    for (int s = 0; s < 2 && hit == kNoPoint; ++s) {
      visit_query_nodes(s, [&](NodeId n) {
        if (hit == kNoPoint && node_witnesses(s, n, t, strict)) hit = sides_[s].tern[n].pl.winner;
      });
    }
    return hit;
  }

  // All intersecting points (closed or strict), appended to out.
  void query_all_witnesses(const S& t, bool strict, std::vector<PointId>& out) const {
    for (int s = 0; s < 2; ++s) {
      visit_query_nodes(s, [&](NodeId n) { report_rec(s, n, t, strict, out); });
    }
  }

  // --- test and oracle support -------------------------------------------

  // Every stored link as a (w, z) node pair, sorted.
  std::vector<std::pair<NodeId, NodeId>> stored_links() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for_each_tern(0, [&](NodeId w) {
      for (std::uint32_t l = sides_[0].tern[w].pl.links_head; l != kNilLink; l = links_[l].next_w)
        out.emplace_back(links_[l].w, links_[l].z);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  // Independent recomputation of the mutual-membership link set over the
  // current tree shapes; the stored set must always equal it.
  std::vector<std::pair<NodeId, NodeId>> derived_links() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for_each_tern(0, [&](NodeId w) {
      enumerate_partners(0, w, [&](NodeId z) { out.emplace_back(w, z); });
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  template <class F>
  void for_each_tern(int s, F&& f) const {
    const TreeSide<M>& side = sides_[s];
    side.prim.visit_nodes(side.root, [&](NodeId u) {
      side.sec.visit_nodes(side.prim[u].pl.sec_root, [&](NodeId v) {
        side.tern.visit_nodes(side.sec[v].pl.tern_root, [&](NodeId w) { f(w); });
      });
    });
  }

  void validate(const S& now) const {
    for (int s = 0; s < 2; ++s) {
      const TreeSide<M>& side = sides_[s];
      side.prim.validate(side.root, key_less(FrameAxis::X));
      side.prim.visit_nodes(side.root, [&](NodeId u) {
        side.sec.validate(side.prim[u].pl.sec_root, key_less(FrameAxis::Y));
        GSQ_CHECK(side.sec[side.prim[u].pl.sec_root].size == side.prim[u].size,
                  "secondary size mismatch");
        side.sec.visit_nodes(side.prim[u].pl.sec_root, [&](NodeId v) {
          GSQ_CHECK(side.sec[v].pl.owner_u == u, "bad owner_u");
          side.tern.validate(side.sec[v].pl.tern_root, key_less(FrameAxis::Gamma));
          GSQ_CHECK(side.tern[side.sec[v].pl.tern_root].size == side.sec[v].size,
                    "ternary size mismatch");
          side.tern.visit_nodes(side.sec[v].pl.tern_root, [&](NodeId w) {
            GSQ_CHECK(side.tern[w].pl.owner_v == v, "bad owner_v");
            check_winner(s, w, now);
          });
        });
      });
    }
    GSQ_CHECK(stored_links() == derived_links(), "link set does not match mutual membership");
  }

  std::uint32_t max_links_per_node() const {
    std::uint32_t best = 0;
    for (int s = 0; s < 2; ++s) {
      for_each_tern(s, [&](NodeId n) {
        std::uint32_t c = 0;
        const std::uint32_t head = sides_[s].tern[n].pl.links_head;
        for (std::uint32_t l = head; l != kNilLink; l = (s == 0 ? links_[l].next_w : links_[l].next_z))
          ++c;
        best = std::max(best, c);
      });
    }
    return best;
  }

  std::size_t live_links() const { return links_.live(); }

 private:
  // --- hooks wiring -------------------------------------------------------

  enum Layer : std::uint8_t { kPrim = 0, kSec = 1, kTern = 2 };

  struct DriftEntry {
    std::uint8_t side;
    std::uint8_t layer;
    bool parent_input;
    NodeId node;
    PointId old_id;
  };

  struct TernaryHooks : NullHooks {
    LinkedStructure* I;
    int s;
    NodeId owner_v;
    const S* now;
    void assoc_build(NodeId n, BuildReason) {
      I->tern_destroy(s, n);  // rotation reuses the node id: drop old cert and links
      I->sides_[s].tern[n].pl.owner_v = owner_v;
      tourn_recompute_winner(I->sides_[s].tern, n, I->tourn_ctx(s), *now);
      tourn_resched_cert(I->sides_[s].tern, n, I->tourn_ctx(s), I->tournament_q_, *now);
      I->fresh_.push_back({static_cast<std::uint8_t>(s), n});
    }
    void assoc_destroy(NodeId n) { I->tern_destroy(s, n); }
    void assoc_insert(NodeId n, PointId) { touch(n); }
    void assoc_erase(NodeId n, PointId) { touch(n); }
    void children_changed(NodeId n) { touch(n); }
    void touch(NodeId n) {
      const bool ch = tourn_recompute_winner(I->sides_[s].tern, n, I->tourn_ctx(s), *now);
      tourn_resched_cert(I->sides_[s].tern, n, I->tourn_ctx(s), I->tournament_q_, *now);
      if (ch) I->winners_.push_back({static_cast<std::uint8_t>(s), n});
    }
    void extreme_changed(NodeId n, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kTern, false, n, old});
    }
    void parent_input_changed(NodeId n, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kTern, true, n, old});
    }
  };

  struct SecondaryHooks : NullHooks {
    LinkedStructure* I;
    int s;
    NodeId owner_u;
    const S* now;
    void assoc_build(NodeId v, BuildReason) {
      auto& side = I->sides_[s];
      side.sec[v].pl.owner_u = owner_u;
      if (side.sec[v].pl.tern_root != kNil) I->tern_destroy_tree(s, side.sec[v].pl.tern_root);
      std::vector<PointId> items = side.sec.items_of(v);
      std::sort(items.begin(), items.end(), I->key_less(FrameAxis::Gamma));
      TernaryHooks thk{{}, I, s, v, now};
      side.sec[v].pl.tern_root = side.tern.bulk_build(
          items.data(), static_cast<std::uint32_t>(items.size()), thk);
    }
    void assoc_destroy(NodeId v) {
      auto& side = I->sides_[s];
      if (side.sec[v].pl.tern_root != kNil) {
        I->tern_destroy_tree(s, side.sec[v].pl.tern_root);
        side.sec[v].pl.tern_root = kNil;
      }
    }
    void assoc_insert(NodeId v, PointId p) {
      TernaryHooks thk{{}, I, s, v, now};
      I->sides_[s].tern.insert(I->sides_[s].sec[v].pl.tern_root, p,
                               I->key_less(FrameAxis::Gamma), thk);
    }
    void assoc_erase(NodeId v, PointId p) {
      TernaryHooks thk{{}, I, s, v, now};
      I->sides_[s].tern.erase(I->sides_[s].sec[v].pl.tern_root, p, I->key_less(FrameAxis::Gamma),
                              thk);
    }
    void extreme_changed(NodeId v, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kSec, false, v, old});
    }
    void parent_input_changed(NodeId v, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kSec, true, v, old});
    }
  };

  struct PrimaryHooks : NullHooks {
    LinkedStructure* I;
    int s;
    const S* now;
    void assoc_build(NodeId u, BuildReason) {
      auto& side = I->sides_[s];
      if (side.prim[u].pl.sec_root != kNil) I->sec_destroy_tree(s, side.prim[u].pl.sec_root);
      std::vector<PointId> items = side.prim.items_of(u);
      std::sort(items.begin(), items.end(), I->key_less(FrameAxis::Y));
      SecondaryHooks shk{{}, I, s, u, now};
      side.prim[u].pl.sec_root =
          side.sec.bulk_build(items.data(), static_cast<std::uint32_t>(items.size()), shk);
    }
    void assoc_destroy(NodeId u) {
      auto& side = I->sides_[s];
      if (side.prim[u].pl.sec_root != kNil) {
        I->sec_destroy_tree(s, side.prim[u].pl.sec_root);
        side.prim[u].pl.sec_root = kNil;
      }
    }
    void assoc_insert(NodeId u, PointId p) {
      SecondaryHooks shk{{}, I, s, u, now};
      I->sides_[s].sec.insert(I->sides_[s].prim[u].pl.sec_root, p, I->key_less(FrameAxis::Y), shk);
    }
    void assoc_erase(NodeId u, PointId p) {
      SecondaryHooks shk{{}, I, s, u, now};
      I->sides_[s].sec.erase(I->sides_[s].prim[u].pl.sec_root, p, I->key_less(FrameAxis::Y), shk);
    }
    void extreme_changed(NodeId u, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kPrim, false, u, old});
    }
    void parent_input_changed(NodeId u, PointId old) {
      I->drift_.push_back({static_cast<std::uint8_t>(s), kPrim, true, u, old});
    }
  };

  // --- destruction --------------------------------------------------------

  void tern_destroy(int s, NodeId n) {
    auto& pl = sides_[s].tern[n].pl;
    if (pl.cert.valid()) {
      tournament_q_.cancel(pl.cert);
      pl.cert = QueueHandle::none();
    }
    unlink_all(s, n);
  }

  void tern_destroy_tree(int s, NodeId root) {
    sides_[s].tern.visit_nodes(root, [&](NodeId n) { tern_destroy(s, n); });
    // frees after the walk so the traversal stays intact
    free_scratch_.clear();
    sides_[s].tern.visit_nodes(root, [&](NodeId n) { free_scratch_.push_back(n); });
    for (NodeId n : free_scratch_) sides_[s].tern.dealloc(n);
  }

  void sec_destroy_tree(int s, NodeId root) {
    std::vector<NodeId> all;
    sides_[s].sec.visit_nodes(root, [&](NodeId v) { all.push_back(v); });
    for (NodeId v : all) {
      if (sides_[s].sec[v].pl.tern_root != kNil) tern_destroy_tree(s, sides_[s].sec[v].pl.tern_root);
      sides_[s].sec.dealloc(v);
    }
  }

  // --- linking ------------------------------------------------------------

  void unlink_all(int s, NodeId n) {
    auto& pl = sides_[s].tern[n].pl;
    std::uint32_t l = pl.links_head;
    while (l != kNilLink) {
      LinkRec& rec = links_[l];
      const std::uint32_t next = (s == 0) ? rec.next_w : rec.next_z;
      // detach from the opposite endpoint's list
      if (s == 0) {
        detach(rec.z, 1, l);
      } else {
        detach(rec.w, 0, l);
      }
      linking_q_.cancel(rec.cert);
      links_.dealloc(l);
      l = next;
    }
    pl.links_head = kNilLink;
  }

  void detach(NodeId node, int node_side, std::uint32_t l) {
    LinkRec& rec = links_[l];
    const std::uint32_t prev = node_side == 0 ? rec.prev_w : rec.prev_z;
    const std::uint32_t next = node_side == 0 ? rec.next_w : rec.next_z;
    if (prev != kNilLink) {
      (node_side == 0 ? links_[prev].next_w : links_[prev].next_z) = next;
    } else {
      sides_[node_side].tern[node].pl.links_head = next;
    }
    if (next != kNilLink) (node_side == 0 ? links_[next].prev_w : links_[next].prev_z) = prev;
  }

  // A linking certificate fails exactly when the stored upper-right corner
  // reaches the stored lower-left corner; the crossing is the covered pair's
  // true contact time, so it is computed directly (an already-overlapping
  // pair yields its past contact and surfaces immediately).
  Time<M> link_failure(NodeId w, NodeId z, const S&, PointId& p_out, PointId& q_out) const {
    const PointId p = sides_[0].tern[w].pl.winner;  // lower-left winner
    const PointId q = sides_[1].tern[z].pl.winner;  // upper-right winner
    p_out = p;
    q_out = q;
    const S& lx = frame_x(*reg_, frame_, p);
    const S& rx = frame_x(*reg_, frame_, q);
    const S& hp = reg_->value(Registry<M>::kHalfW, p);
    const S& hq = reg_->value(Registry<M>::kHalfW, q);
    return Time<M>((lx - rx) / (hp + hq));
  }

  void create_link(NodeId w, NodeId z, const S& now) {
    const std::uint32_t l = links_.alloc();
    LinkRec& rec = links_[l];
    rec.w = w;
    rec.z = z;
    PointId p, q;
    Certificate<M> cert;
    cert.failure = link_failure(w, z, now, p, q);
    cert.kind = CertKind::Linking;
    cert.owner = CertOwner{0, w, l};
    cert.lhs_id = q;
    cert.rhs_id = p;
    rec.cert = linking_q_.schedule(cert);
    auto& wh = sides_[0].tern[w].pl.links_head;
    rec.next_w = wh;
    if (wh != kNilLink) links_[wh].prev_w = l;
    wh = l;
    auto& zh = sides_[1].tern[z].pl.links_head;
    rec.next_z = zh;
    if (zh != kNilLink) links_[zh].prev_z = l;
    zh = l;
  }

  // Re-derives the failure times of n's links from the current winners.
  void retime_links(int s, NodeId n, const S& now) {
    for (std::uint32_t l = sides_[s].tern[n].pl.links_head; l != kNilLink;
         l = (s == 0 ? links_[l].next_w : links_[l].next_z)) {
      LinkRec& rec = links_[l];
      linking_q_.cancel(rec.cert);
      PointId p, q;
      Certificate<M> cert;
      cert.failure = link_failure(rec.w, rec.z, now, p, q);
      cert.kind = CertKind::Linking;
      cert.owner = CertOwner{0, rec.w, l};
      cert.lhs_id = q;
      cert.rhs_id = p;
      rec.cert = linking_q_.schedule(cert);
    }
  }

  // Enumerates the mutual-membership partners of node n (side s): canonical
  // candidates of the opposite tree for n's query point, filtered by the
  // constant-time reverse test on n's own chain.
  // The mutual test factorizes per layer, so each reverse condition prunes
  // a whole subtree of candidates as soon as its layer fails.
  template <class Emit>
  void enumerate_partners(int s, NodeId n, Emit&& emit) const {
    const TreeSide<M>& self = sides_[s];
    const TreeSide<M>& opp = sides_[1 - s];
    if (opp.root == kNil) return;
    const NodeId v = self.tern[n].pl.owner_v;
    const NodeId u = self.sec[v].pl.owner_u;
    const PointId m1 = self.prim[u].extreme;
    const PointId m2 = self.sec[v].extreme;
    const PointId m3 = self.tern[n].extreme;
    const auto lx = key_less(FrameAxis::X);
    const auto ly = key_less(FrameAxis::Y);
    const auto lg = key_less(FrameAxis::Gamma);
    opp.prim.canonical_visit(opp.root, m1, false, lx, [&](NodeId u2) {
      if (!self.prim.is_canonical_for(u, opp.prim[u2].extreme, false, lx)) return;
      opp.sec.canonical_visit(opp.prim[u2].pl.sec_root, m2, false, ly, [&](NodeId v2) {
        if (!self.sec.is_canonical_for(v, opp.sec[v2].extreme, false, ly)) return;
        opp.tern.canonical_visit(opp.sec[v2].pl.tern_root, m3, true, lg, [&](NodeId z) {
          if (self.tern.is_canonical_for(n, opp.tern[z].extreme, true, lg)) emit(z);
        });
      });
    });
  }

  void refresh_links(int s, NodeId n, const S& now) {
    unlink_all(s, n);
    enumerate_partners(s, n, [&](NodeId z) {
      if (s == 0)
        create_link(n, z, now);
      else
        create_link(z, n, now);
    });
    ++stats_.link_refreshes;
  }

  // Refreshes group_scratch_[i..j), all tournament nodes of the complex of
  // secondary node v on side s.
  void refresh_group(std::uint8_t s, NodeId v, std::size_t i, std::size_t j, const S& now) {
    const TreeSide<M>& self = sides_[s];
    const TreeSide<M>& opp = sides_[1 - s];
    const auto lx = key_less(FrameAxis::X);
    const auto ly = key_less(FrameAxis::Y);
    const auto lg = key_less(FrameAxis::Gamma);
    const NodeId u = self.sec[v].pl.owner_u;
    group_pairs_.clear();
    if (opp.root != kNil) {
      opp.prim.canonical_visit(opp.root, self.prim[u].extreme, false, lx, [&](NodeId u2) {
        if (!self.prim.is_canonical_for(u, opp.prim[u2].extreme, false, lx)) return;
        opp.sec.canonical_visit(opp.prim[u2].pl.sec_root, self.sec[v].extreme, false, ly,
                                [&](NodeId v2) {
                                  if (!self.sec.is_canonical_for(v, opp.sec[v2].extreme, false, ly))
                                    return;
                                  group_pairs_.push_back(v2);
                                });
      });
    }
    for (std::size_t k = i; k < j; ++k) {
      const NodeId n = std::get<2>(group_scratch_[k]);
      unlink_all(s, n);
      const PointId m3 = self.tern[n].extreme;
      for (NodeId v2 : group_pairs_) {
        opp.tern.canonical_visit(opp.sec[v2].pl.tern_root, m3, true, lg, [&](NodeId z) {
          if (!self.tern.is_canonical_for(n, opp.tern[z].extreme, true, lg)) return;
          if (s == 0)
            create_link(n, z, now);
          else
            create_link(z, n, now);
        });
      }
      ++stats_.link_refreshes;
    }
  }

  // --- update driver ------------------------------------------------------

  void begin_update() {
    fresh_.clear();
    drift_.clear();
    winners_.clear();
    ++epoch_;
  }

  void add_suspect(std::uint8_t s, NodeId n) {
    auto& st = stamp_[s];
    if (st.size() < sides_[s].tern.capacity()) st.resize(sides_[s].tern.capacity(), 0);
    if (st[n] == epoch_) return;
    st[n] = epoch_;
    suspects_.push_back({s, n});
  }

  bool suspected(std::uint8_t s, NodeId n) const {
    return n < stamp_[s].size() && stamp_[s][n] == epoch_;
  }

  void end_update(const S& now) {
    // Expand the drift log into the set of tournament nodes whose mutual-
    // membership inputs changed, then re-derive links there; nodes whose only
    // change is the winner get their certificate failure times recomputed.
    suspects_.clear();
    for (const auto& [s, n] : fresh_) add_suspect(s, n);
    for (const DriftEntry& d : drift_) {
      TreeSide<M>& side = sides_[d.side];
      switch (d.layer) {
        case kPrim: {
          if (!side.prim[d.node].alive()) break;
          const WbNode<PrimaryPl>& un = side.prim[d.node];
          if (d.parent_input) {
            const PointId cur = un.parent == kNil ? kNoPoint : side.prim[un.parent].extreme;
            if (cur != d.old_id) add_primary_complex(d.side, d.node);
          } else if (un.extreme != d.old_id) {
            add_primary_complex(d.side, d.node);
            if (!un.leaf()) {
              add_primary_complex(d.side, un.left);
              add_primary_complex(d.side, un.right);
            }
          }
          break;
        }
        case kSec: {
          if (!side.sec[d.node].alive()) break;
          const WbNode<SecondaryPl>& vn = side.sec[d.node];
          if (d.parent_input) {
            const PointId cur = vn.parent == kNil ? kNoPoint : side.sec[vn.parent].extreme;
            if (cur != d.old_id) add_tern_tree(d.side, vn.pl.tern_root);
          } else if (vn.extreme != d.old_id) {
            add_tern_tree(d.side, vn.pl.tern_root);
            if (!vn.leaf()) {
              add_tern_tree(d.side, side.sec[vn.left].pl.tern_root);
              add_tern_tree(d.side, side.sec[vn.right].pl.tern_root);
            }
          }
          break;
        }
        default: {
          if (!side.tern[d.node].alive()) break;
          const WbNode<TernaryPl>& wn = side.tern[d.node];
          if (d.parent_input) {
            const PointId cur = wn.parent == kNil ? kNoPoint : side.tern[wn.parent].extreme;
            if (cur != d.old_id) add_suspect(d.side, d.node);
          } else if (wn.extreme != d.old_id) {
            add_suspect(d.side, d.node);
            if (!wn.leaf()) {
              add_suspect(d.side, wn.left);
              add_suspect(d.side, wn.right);
            }
          }
          break;
        }
      }
    }
    // Group the refreshes by owning secondary node: all tournament nodes of
    // one complex share the first two coordinates of their query point, so
    // the candidate ancestors are computed once per group.
    group_scratch_.clear();
    for (const auto& [s, n] : suspects_) {
      if (sides_[s].tern[n].alive())
        group_scratch_.push_back({s, sides_[s].tern[n].pl.owner_v, n});
    }
    // suspects arrive clustered by complex; a run split only costs a repeated
    // candidate computation, so consecutive grouping suffices
    for (std::size_t i = 0; i < group_scratch_.size();) {
      std::size_t j = i;
      while (j < group_scratch_.size() && std::get<0>(group_scratch_[j]) == std::get<0>(group_scratch_[i]) &&
             std::get<1>(group_scratch_[j]) == std::get<1>(group_scratch_[i]))
        ++j;
      refresh_group(std::get<0>(group_scratch_[i]), std::get<1>(group_scratch_[i]), i, j, now);
      i = j;
    }
    std::sort(winners_.begin(), winners_.end());
    winners_.erase(std::unique(winners_.begin(), winners_.end()), winners_.end());
    for (const auto& [s, n] : winners_) {
      if (!sides_[s].tern[n].alive()) continue;
      if (suspected(s, n)) continue;
      retime_links(s, n, now);
    }
  }

  void add_primary_complex(std::uint8_t s, NodeId u) {
    TreeSide<M>& side = sides_[s];
    if (!side.prim[u].alive()) return;
    side.sec.visit_nodes(side.prim[u].pl.sec_root,
                         [&](NodeId v) { add_tern_tree(s, side.sec[v].pl.tern_root); });
  }

  void add_tern_tree(std::uint8_t s, NodeId root) {
    sides_[s].tern.visit_nodes(root, [&](NodeId n) { add_suspect(s, n); });
  }

  void check_winner(int s, NodeId n, const S& now) const {
    const TreeSide<M>& side = sides_[s];
    const TournCtx<M> ctx = tourn_ctx(s);
    PointId best = kNoPoint;
    side.tern.visit_leaves(n, [&](NodeId leaf) {
      const PointId p = side.tern[leaf].item;
      if (best == kNoPoint || tourn_before(ctx, p, best, now)) best = p;
    });
    GSQ_CHECK(side.tern[n].pl.winner == best, "stored winner is not the subtree extremum");
  }

  void report_rec(int s, NodeId n, const S& t, bool strict, std::vector<PointId>& out) const {
    if (!node_witnesses(s, n, t, strict)) return;
    const auto& nn = sides_[s].tern[n];
    if (nn.leaf()) {
      out.push_back(nn.item);
      return;
    }
    report_rec(s, nn.left, t, strict, out);
    report_rec(s, nn.right, t, strict, out);
  }

  const Registry<M>* reg_;
  Frame frame_;
  StructureConfig cfg_;
  TreeSide<M> sides_[2];
  EventQueue<M> tournament_q_;
  EventQueue<M> linking_q_;
  LinkPool links_;
  StructureStats stats_;

  std::vector<std::pair<std::uint8_t, NodeId>> fresh_;
  std::vector<std::pair<std::uint8_t, NodeId>> winners_;
  std::vector<std::pair<std::uint8_t, NodeId>> suspects_;
  std::vector<DriftEntry> drift_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> stamp_[2];
  std::vector<std::tuple<std::uint8_t, NodeId, NodeId>> group_scratch_;
  std::vector<NodeId> group_pairs_;
  std::vector<NodeId> winner_scratch_;
  std::vector<NodeId> free_scratch_;
};

}  // namespace gsq
