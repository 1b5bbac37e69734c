#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "gsq/event_queue.hpp"
#include "helpers.hpp"

using namespace gsq;
using gsqtest::Rng;

namespace {
template <class M>
Certificate<M> cert_at(typename M::Scalar t) {
  Certificate<M> c;
  c.failure = Time<M>(t);
  return c;
}
}  // namespace

TEST_CASE("failure time of crossing motions") {
  using M = FloatMode;
  // upper-right corner of q (x=4, w=1) catches the lower-left corner of
  // p (x=10, w=2) when 4 + t/2 = 10 - t.
  LinearMotion<M> rq{4.0, 0.5};
  LinearMotion<M> lp{10.0, -1.0};
  auto t = failure_time(rq, 1, lp, 0, 0.0);
  CHECK(!t.is_inf());
  CHECK(t.value == 4.0);
  CHECK(rq.at(t.value) == lp.at(t.value));

  // parallel, lhs below: never fails
  CHECK(failure_time<M>({0.0, 1.0}, 0, {5.0, 1.0}, 1, 0.0).is_inf());
  // diverging from equality: never fails
  CHECK(failure_time<M>({3.0, -1.0}, 0, {3.0, 2.0}, 1, 0.0).is_inf());
  // crossing upward from equality: fails immediately
  auto now_fail = failure_time<M>({3.0, 2.0}, 0, {3.0, -1.0}, 1, 0.0);
  CHECK(!now_fail.is_inf());
  CHECK(now_fail.value == 0.0);
  // identical motions: id perturbation keeps the assertion forever
  CHECK(failure_time<M>({3.0, 1.0}, 0, {3.0, 1.0}, 1, 0.0).is_inf());
  CHECK_THROWS_AS(failure_time<ExactMode>({mpq_class(5), mpq_class(0)}, 0,
                                          {mpq_class(4), mpq_class(0)}, 1, mpq_class(0)),
                  invariant_error);
}

TEST_CASE("failure times are exact in exact mode") {
  using M = ExactMode;
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    LinearMotion<M> a{mpq_class(rng.range(-50, 50)), mpq_class(rng.range(-9, 9))};
    LinearMotion<M> b{mpq_class(rng.range(-50, 50)), mpq_class(rng.range(-9, 9))};
    if (scalar_cmp(a.at(0), b.at(0)) > 0) std::swap(a, b);
    const auto t = failure_time(a, 0, b, 1, mpq_class(0));
    if (t.is_inf()) {
      CHECK(scalar_cmp(a.b, b.b) <= 0);  // never catches up
    } else {
      CHECK(a.at(t.value) == b.at(t.value));
    }
  }
}

TEST_CASE("queue pops in failure-time order with handle tiebreak") {
  using M = FloatMode;
  EventQueue<M> q;
  auto h3 = q.schedule(cert_at<M>(3.0));
  auto h1 = q.schedule(cert_at<M>(1.0));
  auto h2 = q.schedule(cert_at<M>(2.0));
  (void)h3;
  (void)h1;
  (void)h2;
  CHECK(q.pop().failure.value == 1.0);
  CHECK(q.pop().failure.value == 2.0);
  CHECK(q.pop().failure.value == 3.0);
  CHECK(q.empty());

  auto a = q.schedule(cert_at<M>(2.0));
  auto b = q.schedule(cert_at<M>(2.0));
  CHECK(a.slot < b.slot);
  CHECK(q.top_handle().slot == a.slot);
  q.pop();
  CHECK(q.top_handle().slot == b.slot);
  q.pop();

  auto c = q.schedule(cert_at<M>(5.0));
  q.cancel(c);
  CHECK(q.empty());
  Certificate<M> out;
  CHECK(!q.pop_due(Time<M>(100.0), out));
  CHECK_THROWS_AS(q.cancel(c), invariant_error);
}

TEST_CASE("random schedule/cancel interleavings match a sorted reference") {
  using M = FloatMode;
  Rng rng(43);
  for (int round = 0; round < 50; ++round) {
    EventQueue<M> q;
    std::vector<std::pair<double, std::uint32_t>> ref;  // (time, slot)
    std::vector<QueueHandle> live;
    for (int op = 0; op < 300; ++op) {
      if (live.empty() || rng.below(3) != 0) {
        const double t = static_cast<double>(rng.range(0, 40));
        auto h = q.schedule(cert_at<M>(t));
        live.push_back(h);
        ref.emplace_back(t, h.slot);
      } else {
        const std::size_t k = rng.below(live.size());
        const QueueHandle h = live[k];
        q.cancel(h);
        live.erase(live.begin() + k);
        ref.erase(std::find_if(ref.begin(), ref.end(),
                               [&](const auto& e) { return e.second == h.slot; }));
      }
    }
    std::sort(ref.begin(), ref.end());
    CHECK(q.size() == ref.size());
    for (const auto& e : ref) {
      CHECK(q.top().failure.value == e.first);
      CHECK(q.top_handle().slot == e.second);
      q.pop();
    }
  }
}
