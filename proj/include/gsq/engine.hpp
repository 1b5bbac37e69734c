#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsq/linked_structure.hpp"

namespace gsq {

struct EngineConfig {
  int instances = 8;  // 8: paper-faithful, two per quadrant; 4: identity and
                      // x-reflection frames only, which already cover every
                      // dominance-comparable pair
  std::uint32_t alpha_num = 1, alpha_den = 4;
  double eps = 1e-9;  // kinetic comparison tolerance, float mode only
  // Worker threads for updating the independent structure instances of one
  // logical operation (each op still completes before the next begins).
  // 1 = sequential.
  unsigned threads = 1;
};

struct RunStats {
  std::size_t n = 0;
  std::uint64_t total_events = 0;
  std::uint64_t tournament_events = 0;
  std::uint64_t linking_events = 0;
  std::size_t peak_certificates = 0;
  std::uint32_t max_links_per_node = 0;
  double wall_ms = 0.0;
  std::string mode;
};

// The frames of the up-to-eight structure instances. Each quadrant (sx, sy)
// contributes its plain frame and the axis-swapped frame (swap, sy, sx),
// which realizes detection for pairs meeting on the other square edge.
inline std::vector<Frame> engine_frames(int instances) {
  GSQ_CHECK(instances == 4 || instances == 8, "engine supports 4 or 8 instances");
  std::vector<Frame> out;
  const std::pair<int, int> quads4[] = {{1, 1}, {-1, 1}};
  const std::pair<int, int> quads8[] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  const auto* quads = instances == 8 ? quads8 : quads4;
  const int nq = instances / 2;
  for (int i = 0; i < nq; ++i) {
    const auto [sx, sy] = quads[i];
    out.push_back(Frame{false, static_cast<std::int8_t>(sx), static_cast<std::int8_t>(sy)});
    out.push_back(Frame{true, static_cast<std::int8_t>(sy), static_cast<std::int8_t>(sx)});
  }
  return out;
}

// The full kinetic data structure: disjoint growing squares under insertion
// and deletion, producing an intersection event at every time two squares
// first touch, plus intersection/containment queries against the current
// configuration.
template <class M>
class Engine {
 public:
  using S = typename M::Scalar;

  struct Event {
    S time{};
    PointId a = kNoPoint, b = kNoPoint;
  };

  explicit Engine(const std::vector<WeightedPoint<M>>& points, EngineConfig cfg = {})
      : cfg_(cfg), pool_(cfg.threads > 1 ? cfg.threads - 1 : 0), now_(0) {
    StructureConfig scfg{cfg.alpha_num, cfg.alpha_den, M::is_exact ? 0.0 : cfg.eps};
    for (const Frame& f : engine_frames(cfg.instances))
      inst_.push_back(std::make_unique<LinkedStructure<M>>(&reg_, f, scfg));
    std::vector<PointId> ids;
    ids.reserve(points.size());
    for (const auto& p : points) {
      check_point(p);
      reg_.add(p);
      ids.push_back(p.id);
    }
    for_instances([&](LinkedStructure<M>& s) { s.build(ids, now_); });
    note_certs();
  }

  const S& now() const { return now_; }
  const Registry<M>& registry() const { return reg_; }
  std::uint32_t live_count() const { return reg_.live_count(); }
  int instance_count() const { return static_cast<int>(inst_.size()); }
  LinkedStructure<M>& instance(int i) { return *inst_[i]; }
  const LinkedStructure<M>& instance(int i) const { return *inst_[i]; }

  // Inserts a square that must be disjoint from the configuration at the
  // current time (boundary contact is allowed and produces an immediate
  // event); a proper overlap is rejected naming the offending square.
  void insert(const WeightedPoint<M>& p) {
    check_point(p);
    if (reg_.alive(p.id))
      throw input_error("insert: id " + std::to_string(p.id) + " already present");
    reg_.set_query(p.x, p.y, p.w);
    const PointId witness = any_witness(now_, /*strict=*/true);
    if (witness != kNoPoint)
      throw input_error("insert rejected: square overlaps square " + std::to_string(witness));
    reg_.add(p);
    for (auto& i : inst_) i->insert(p.id, now_);
    note_certs();
  }

  void erase(PointId id) {
    if (!reg_.alive(id)) throw input_error("erase: unknown id " + std::to_string(id));
    for (auto& i : inst_) i->erase(id, now_);
    reg_.remove(id);
    note_certs();
  }

  // Advances the simulation to the next intersection event at or before the
  // horizon: internal tournament events are processed in global time order,
  // and the earliest linking failure is surfaced as the intersecting pair.
  // Simultaneous contacts are resolved to the lexicographically least
  // (min id, max id) pair, deduplicated across instances. The configuration
  // is left untouched; callers react by deleting/merging and advancing again.
  std::optional<Event> advance_to_next_event(const std::optional<S>& horizon = std::nullopt) {
    for (;;) {
      int ti = -1;
      Time<M> tt = Time<M>::inf();
      Time<M> lt = Time<M>::inf();
      for (std::size_t i = 0; i < inst_.size(); ++i) {
        const auto& tq = inst_[i]->tournament_queue();
        if (!tq.empty() && tq.top().failure < tt) {
          tt = tq.top().failure;
          ti = static_cast<int>(i);
        }
        const auto& lq = inst_[i]->linking_queue();
        if (!lq.empty() && lq.top().failure < lt) lt = lq.top().failure;
      }
      if (ti >= 0 && tt <= lt) {
        if (horizon && tt > Time<M>(*horizon)) return std::nullopt;
        inst_[ti]->process_tournament_event();
        ++tournament_events_;
        note_certs();
        continue;
      }
      if (lt.is_inf()) return std::nullopt;
      if (horizon && lt > Time<M>(*horizon)) return std::nullopt;
      const Event ev = surface_link_event(lt);
      now_ = ev.time;
      ++linking_events_;
      return ev;
    }
  }

  // Minimum-id witness whose closed square intersects the query square at
  // time `at` (kNoPoint if none). Deterministic by construction, so the
  // clustering cascade and its brute-force oracle agree on witnesses.
  PointId intersects_query(const S& qx, const S& qy, const S& qw, const S& at) const {
    GSQ_CHECK(scalar_cmp(at, now_) == 0, "queries run against the current configuration");
    reg_mut().set_query(qx, qy, qw);
    witness_scratch_.clear();
    for (const auto& i : inst_) i->query_all_witnesses(at, /*strict=*/false, witness_scratch_);
    PointId best = kNoPoint;
    for (PointId p : witness_scratch_)
      if (best == kNoPoint || p < best) best = p;
    return best;
  }

  PointId contains_query(const S& x, const S& y, const S& at) const {
    return intersects_query(x, y, S(0), at);
  }

  RunStats stats() const {
    RunStats st;
    st.n = reg_.live_count();
    st.tournament_events = tournament_events_;
    st.linking_events = linking_events_;
    st.total_events = tournament_events_ + linking_events_;
    st.peak_certificates = peak_certs_;
    for (const auto& i : inst_) st.max_links_per_node = std::max(st.max_links_per_node, i->max_links_per_node());
    st.mode = M::is_exact ? "exact" : "float";
    return st;
  }

  std::vector<PointId> live_ids() const {
    std::vector<PointId> out;
    reg_.for_alive([&](PointId i) { out.push_back(i); });
    return out;
  }

  void validate() const {
    for (const auto& i : inst_) i->validate(now_);
  }

 private:
  void check_point(const WeightedPoint<M>& p) {
    if (p.id == kNoPoint || p.id == kQueryId) throw input_error("reserved point id");
    if (scalar_cmp(p.w, S(0)) <= 0)
      throw input_error("weight must be positive (id " + std::to_string(p.id) + ")");
  }

  Registry<M>& reg_mut() const { return const_cast<Registry<M>&>(reg_); }

  PointId any_witness(const S& at, bool strict) const {
    for (const auto& i : inst_) {
      const PointId w = i->query_any_witness(at, strict);
      if (w != kNoPoint) return w;
    }
    return kNoPoint;
  }

  void note_certs() {
    std::size_t total = 0;
    for (const auto& i : inst_) total += i->tournament_queue().size() + i->linking_queue().size();
    peak_certs_ = std::max(peak_certs_, total);
  }

  // All linking certificates failing exactly at t* are drained, the tied
  // contact pairs they reveal are enumerated exactly (corners tied in value
  // with the stored winners), and the least pair wins. Certificates are
  // rescheduled untouched.
  Event surface_link_event(const Time<M>& t_star) {
    const S& t = t_star.value;
    Event best;
    best.time = t;
    pair_scratch_.clear();
    for (auto& ip : inst_) {
      auto& lq = ip->linking_queue();
      drained_.clear();
      while (!lq.empty() && time_cmp(lq.top().failure, t_star) == 0) {
        Certificate<M> cert = lq.pop();
        drained_.push_back(cert);
        collect_tied_pairs(*ip, cert, t);
      }
      for (const Certificate<M>& cert : drained_) {
        // reattach with a fresh handle; the link record tracks it
        ip->links()[cert.owner.link].cert = lq.schedule(cert);
      }
    }
    GSQ_CHECK(!pair_scratch_.empty(), "link event surfaced no intersecting pair");
    std::sort(pair_scratch_.begin(), pair_scratch_.end());
    best.a = pair_scratch_.front().first;
    best.b = pair_scratch_.front().second;
    return best;
  }

  // The pair stored on a failing certificate touches at t*, but further pairs
  // can be tied with it: any tied pair's corners coincide in value with the
  // stored winners at t*. Collect the points attaining the winner value on
  // each side of the certificate and test the cross pairs exactly.
  void collect_tied_pairs(LinkedStructure<M>& ls, const Certificate<M>& cert, const S& t) {
    const auto& rec = ls.links()[cert.owner.link];
    lcand_.clear();
    rcand_.clear();
    collect_value_tied(ls, 0, rec.w, t, lcand_);
    collect_value_tied(ls, 1, rec.z, t, rcand_);
    for (PointId p : lcand_) {
      for (PointId q : rcand_) {
        if (p == q) continue;
        const auto pt = pairwise_intersection_time<M>(reg_.point(p), reg_.point(q));
        if (scalar_cmp_eps(pt, t, M::is_exact ? 0.0 : cfg_.eps) == 0) {
          pair_scratch_.emplace_back(std::min(p, q), std::max(p, q));
        }
      }
    }
  }

  void collect_value_tied(const LinkedStructure<M>& ls, int s, NodeId n, const S& t,
                          std::vector<PointId>& out) const {
    const auto& side = ls.side(s);
    const PointId win = side.tern[n].pl.winner;
    const LinearMotion<M> wm = corner_x_motion(reg_, ls.frame(), win, side.upper);
    collect_value_rec(ls, s, n, t, wm.at(t), out);
  }

  void collect_value_rec(const LinkedStructure<M>& ls, int s, NodeId n, const S& t, const S& v,
                         std::vector<PointId>& out) const {
    const auto& side = ls.side(s);
    const PointId win = side.tern[n].pl.winner;
    const LinearMotion<M> wm = corner_x_motion(reg_, ls.frame(), win, side.upper);
    if (scalar_cmp_eps(wm.at(t), v, M::is_exact ? 0.0 : cfg_.eps) != 0) return;
    const auto& node = side.tern[n];
    if (node.leaf()) {
      out.push_back(node.item);
      return;
    }
    collect_value_rec(ls, s, node.left, t, v, out);
    collect_value_rec(ls, s, node.right, t, v, out);
  }

  EngineConfig cfg_;
  Registry<M> reg_;
  std::vector<std::unique_ptr<LinkedStructure<M>>> inst_;
  S now_;
  std::uint64_t tournament_events_ = 0;
  std::uint64_t linking_events_ = 0;
  std::size_t peak_certs_ = 0;
  std::vector<Certificate<M>> drained_;
  std::vector<std::pair<PointId, PointId>> pair_scratch_;
  std::vector<PointId> lcand_, rcand_;
  mutable std::vector<PointId> witness_scratch_;
};

}  // namespace gsq
