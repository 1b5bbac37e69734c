#pragma once

#include <cstdint>
#include <vector>

#include "gsq/event_queue.hpp"
#include "gsq/frame.hpp"
#include "gsq/wb_tree.hpp"

namespace gsq {

inline constexpr std::uint32_t kNilLink = 0xffffffffu;

// Ternary-layer payload: the tournament state of one range-tree node. The
// winner is the id of the point whose corner attains the subtree extremum at
// the current simulation time; internal nodes guard it with one tournament
// certificate against the losing child (not scheduled when it can never
// fail). links_head chains the linking certificates attached to this node.
struct TernaryPl {
  NodeId owner_v = kNil;
  PointId winner = kNoPoint;
  QueueHandle cert;
  std::uint32_t links_head = kNilLink;
};

// Direction and motion context of one tournament family: min over lower-left
// corners (upper = false) or max over upper-right corners (upper = true), on
// the frame x-axis. MinY/MaxY tournaments are the same structure in a swapped
// frame.
template <class M>
struct TournCtx {
  const Registry<M>* reg = nullptr;
  Frame frame{};
  bool upper = false;
  double eps = 0.0;
  std::uint8_t side_tag = 0;  // CertOwner::side of scheduled certificates
  typename Registry<M>::Field xfield = Registry<M>::kX;

  TournCtx() = default;
  TournCtx(const Registry<M>* r, Frame f, bool up, double e, std::uint8_t tag)
      : reg(r), frame(f), upper(up), eps(e), side_tag(tag),
        xfield(frame_detail::axis_field<M>(f, FrameAxis::X)) {}

  LinearMotion<M> motion(PointId p) const { return corner_x_motion(*reg, frame, p, upper); }

  // Three-way comparison of the corner x-coordinates at time t, through a
  // floating-point filter in exact mode.
  int cmp_at(PointId a, PointId b, const typename M::Scalar& t) const {
    if constexpr (M::is_exact) {
      const double td = to_double(t);
      const double xa = reg->approx(xfield, a), xb = reg->approx(xfield, b);
      const double ha = reg->approx(Registry<M>::kHalfW, a) * td;
      const double hb = reg->approx(Registry<M>::kHalfW, b) * td;
      const double va = upper ? xa + ha : xa - ha;
      const double vb = upper ? xb + hb : xb - hb;
      const double diff = va - vb;
      const double bound =
          (std::fabs(xa) + std::fabs(xb) + std::fabs(ha) + std::fabs(hb)) * 0x1p-48;
      if (diff > bound) return 1;
      if (diff < -bound) return -1;
    }
    return scalar_cmp_eps(corner_x_at(*reg, frame, a, upper, t),
                          corner_x_at(*reg, frame, b, upper, t), eps);
  }
};

// Strict "better" order among corner motions just after time t: by value at
// t, then slope, then perturbed id. Deciding ties by slope keeps a repaired
// winner valid on an open interval after the event.
template <class M>
bool tourn_before(const TournCtx<M>& ctx, PointId a, PointId b, const typename M::Scalar& t) {
  if (a == b) return false;
  int c = ctx.cmp_at(a, b, t);
  if (ctx.upper) c = -c;
  if (c != 0) return c < 0;
  // slopes are +-half_w: on both sides the heavier corner is the more
  // extreme one just after a value tie
  c = scalar_cmp(ctx.reg->value(Registry<M>::kHalfW, b), ctx.reg->value(Registry<M>::kHalfW, a));
  if (c != 0) return c < 0;
  const int dir = ctx.upper ? -ctx.frame.dir_x() : ctx.frame.dir_x();
  return dir > 0 ? a < b : a > b;
}

template <class M>
bool tourn_recompute_winner(WbPool<TernaryPl>& pool, NodeId n, const TournCtx<M>& ctx,
                            const typename M::Scalar& now) {
  WbNode<TernaryPl>& nn = pool[n];
  const PointId old = nn.pl.winner;
  if (nn.leaf()) {
    nn.pl.winner = nn.item;
  } else {
    const PointId wl = pool[nn.left].pl.winner;
    const PointId wr = pool[nn.right].pl.winner;
    nn.pl.winner = tourn_before(ctx, wl, wr, now) ? wl : wr;
  }
  return nn.pl.winner != old;
}

// Cancels and, if it can ever fail, reschedules the certificate guarding
// node n's winner against the losing child's winner.
template <class M>
void tourn_resched_cert(WbPool<TernaryPl>& pool, NodeId n, const TournCtx<M>& ctx,
                        EventQueue<M>& q, const typename M::Scalar& now) {
  WbNode<TernaryPl>& nn = pool[n];
  if (nn.pl.cert.valid()) {
    q.cancel(nn.pl.cert);
    nn.pl.cert = QueueHandle::none();
  }
  if (nn.leaf()) return;
  const PointId win = nn.pl.winner;
  const PointId loser =
      pool[nn.left].pl.winner == win ? pool[nn.right].pl.winner : pool[nn.left].pl.winner;
  const PointId lhs_id = ctx.upper ? loser : win;
  const PointId rhs_id = ctx.upper ? win : loser;
  const Time<M> ft = failure_time(ctx.motion(lhs_id), lhs_id, ctx.motion(rhs_id), rhs_id, now,
                                  ctx.eps, ctx.frame.dir_x());
  if (ft.is_inf()) return;
  Certificate<M> cert;
  cert.failure = ft;
  cert.kind = ctx.upper ? CertKind::TournamentMax : CertKind::TournamentMin;
  cert.owner = CertOwner{ctx.side_tag, n, kNilLink};
  cert.lhs_id = lhs_id;
  cert.rhs_id = rhs_id;
  nn.pl.cert = q.schedule(cert);
}

// Builds a tournament over leaves already sorted along gamma; winners are
// taken at `now` and certificates land in q.
template <class M>
NodeId tourn_build(WbPool<TernaryPl>& pool, const std::vector<PointId>& gamma_sorted,
                   const TournCtx<M>& ctx, EventQueue<M>& q, const typename M::Scalar& now,
                   NodeId owner_v) {
  struct Hooks : NullHooks {
    WbPool<TernaryPl>* pool;
    const TournCtx<M>* ctx;
    EventQueue<M>* q;
    const typename M::Scalar* now;
    NodeId owner_v;
    void assoc_build(NodeId n, BuildReason) {
      (*pool)[n].pl.owner_v = owner_v;
      tourn_recompute_winner(*pool, n, *ctx, *now);
      tourn_resched_cert(*pool, n, *ctx, *q, *now);
    }
  } hk;
  hk.pool = &pool;
  hk.ctx = &ctx;
  hk.q = &q;
  hk.now = &now;
  hk.owner_v = owner_v;
  return pool.bulk_build(gamma_sorted.data(), static_cast<std::uint32_t>(gamma_sorted.size()), hk);
}

// Repairs winners after the tournament certificate of node n failed at `now`:
// recomputes bottom-up from n until a node's winner is unchanged, replacing
// certificates along the way. Returns the nodes whose winner changed; their
// linking certificates need a failure-time refresh by the layer above.
template <class M>
void tourn_handle_failure(WbPool<TernaryPl>& pool, NodeId n, const TournCtx<M>& ctx,
                          EventQueue<M>& q, const typename M::Scalar& now,
                          std::vector<NodeId>& winner_changed) {
  NodeId cur = n;
  while (cur != kNil) {
    const bool changed = tourn_recompute_winner(pool, cur, ctx, now);
    tourn_resched_cert(pool, cur, ctx, q, now);
    if (!changed) break;
    winner_changed.push_back(cur);
    cur = pool[cur].parent;
  }
}

}  // namespace gsq
