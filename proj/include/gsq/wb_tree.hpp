#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsq/geometry.hpp"
#include "gsq/numeric.hpp"

namespace gsq {

using NodeId = std::uint32_t;
inline constexpr NodeId kNil = 0xffffffffu;

enum class BuildReason : std::uint8_t { FreshLeaf, FreshParent, Rotation, Bulk };

// Leaf-oriented weight-balanced (BB[alpha]) search tree over PointId items.
// Internal nodes route by a split item (the rightmost leaf of the left
// subtree); every node summarizes its subtree by size and a boundary leaf
// (leftmost in min-direction pools, rightmost in max-direction pools), which
// is exactly the extreme needed for one-sided canonical decompositions and
// the O(1) ancestor-membership test.
//
// Nodes live in a shared pool so that many trees (e.g. all secondary trees of
// a layered range tree) reuse one allocator; a tree is identified by its root
// id. Structural mutations report to a Hooks object, which is how the layered
// structure maintains associated structures, kinetic state, and the drift log
// of changed canonical-set inputs.
template <class Payload>
struct WbNode {
  NodeId parent = kNil;
  NodeId left = kNil;
  NodeId right = kNil;
  std::uint32_t size = 0;       // leaf count; 0 marks a freed node
  PointId item = kNoPoint;      // leaf: element; internal: split
  PointId extreme = kNoPoint;   // boundary leaf of the subtree
  Payload pl{};

  bool leaf() const { return left == kNil; }
  bool alive() const { return size != 0; }
};

struct NullHooks {
  void assoc_build(NodeId, BuildReason) {}
  void assoc_destroy(NodeId) {}
  void assoc_insert(NodeId, PointId) {}
  void assoc_erase(NodeId, PointId) {}
  void extreme_changed(NodeId, PointId) {}
  void parent_input_changed(NodeId, PointId) {}
  void children_changed(NodeId) {}
};

// Report of one update: which nodes had associated structures rebuilt from
// scratch (rotations), and every node affected by the update (leaf path,
// rotated nodes, rebuilt nodes).
struct RebuildReport {
  std::vector<NodeId> rebuilt;
  std::vector<NodeId> affected;
};

// Hooks that assemble a RebuildReport; wrap them around another hooks object
// when the caller also maintains associated structures.
template <class Inner = NullHooks>
struct ReportingHooks : Inner {
  RebuildReport report;
  void assoc_build(NodeId n, BuildReason r) {
    if (r == BuildReason::Rotation) report.rebuilt.push_back(n);
    report.affected.push_back(n);
    Inner::assoc_build(n, r);
  }
  void assoc_insert(NodeId n, PointId p) {
    report.affected.push_back(n);
    Inner::assoc_insert(n, p);
  }
  void assoc_erase(NodeId n, PointId p) {
    report.affected.push_back(n);
    Inner::assoc_erase(n, p);
  }
  void children_changed(NodeId n) {
    report.affected.push_back(n);
    Inner::children_changed(n);
  }
};

template <class Payload>
class WbPool {
 public:
  bool max_dir = false;  // false: extreme is the leftmost leaf; true: rightmost
  std::uint32_t alpha_num = 1, alpha_den = 4;

  WbNode<Payload>& operator[](NodeId n) { return nodes_[n]; }
  const WbNode<Payload>& operator[](NodeId n) const { return nodes_[n]; }
  std::size_t capacity() const { return nodes_.size(); }

  NodeId alloc() {
    if (!free_.empty()) {
      const NodeId n = free_.back();
      free_.pop_back();
      nodes_[n] = WbNode<Payload>{};
      return n;
    }
    nodes_.emplace_back();
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void dealloc(NodeId n) {
    nodes_[n].size = 0;
    nodes_[n].item = kNoPoint;
    free_.push_back(n);
  }

  void clear() {
    nodes_.clear();
    free_.clear();
  }

  template <class Less, class Hooks>
  NodeId insert(NodeId& root, PointId item, const Less& less, Hooks& hk) {
    if (root == kNil) {
      const NodeId leaf = make_leaf(item, kNil);
      root = leaf;
      hk.assoc_build(leaf, BuildReason::FreshLeaf);
      return leaf;
    }
    NodeId cur = root;
    while (!nodes_[cur].leaf())
      cur = !less(nodes_[cur].item, item) ? nodes_[cur].left : nodes_[cur].right;
    const NodeId y = cur;
    GSQ_CHECK(less(item, nodes_[y].item) || less(nodes_[y].item, item),
              "WbTree::insert: duplicate key");

    const NodeId g = nodes_[y].parent;
    const PointId y_old_input = g == kNil ? kNoPoint : nodes_[g].extreme;
    const NodeId x = make_leaf(item, kNil);
    const NodeId p = alloc();
    WbNode<Payload>& pn = nodes_[p];
    const bool x_left = less(item, nodes_[y].item);
    pn.left = x_left ? x : y;
    pn.right = x_left ? y : x;
    pn.size = 2;
    pn.item = nodes_[pn.left].item;
    pn.extreme = nodes_[max_dir ? pn.right : pn.left].extreme;
    pn.parent = g;
    nodes_[x].parent = p;
    nodes_[y].parent = p;
    if (g == kNil)
      root = p;
    else
      (nodes_[g].left == y ? nodes_[g].left : nodes_[g].right) = p;

    hk.assoc_build(x, BuildReason::FreshLeaf);
    hk.assoc_build(p, BuildReason::FreshParent);
    hk.parent_input_changed(y, y_old_input);
    walk_up(root, g, item, /*inserting=*/true, less, hk);
    return x;
  }

  template <class Less, class Hooks>
  void erase(NodeId& root, PointId item, const Less& less, Hooks& hk) {
    GSQ_CHECK(root != kNil, "WbTree::erase: empty tree");
    NodeId cur = root;
    while (!nodes_[cur].leaf())
      cur = !less(nodes_[cur].item, item) ? nodes_[cur].left : nodes_[cur].right;
    const NodeId y = cur;
    GSQ_CHECK(!less(item, nodes_[y].item) && !less(nodes_[y].item, item),
              "WbTree::erase: missing key");

    hk.assoc_destroy(y);
    const NodeId p = nodes_[y].parent;
    if (p == kNil) {
      dealloc(y);
      root = kNil;
      return;
    }
    const NodeId s = nodes_[p].left == y ? nodes_[p].right : nodes_[p].left;
    const NodeId g = nodes_[p].parent;
    const PointId s_old_input = nodes_[p].extreme;
    hk.assoc_destroy(p);
    nodes_[s].parent = g;
    if (g == kNil)
      root = s;
    else
      (nodes_[g].left == p ? nodes_[g].left : nodes_[g].right) = s;
    dealloc(y);
    dealloc(p);
    hk.parent_input_changed(s, s_old_input);
    walk_up(root, g, item, /*inserting=*/false, less, hk);
  }

  // Builds a perfectly balanced tree over items already sorted by `less`.
  // Associated structures are announced bottom-up.
  template <class Hooks>
  NodeId bulk_build(const PointId* items, std::uint32_t count, Hooks& hk) {
    if (count == 0) return kNil;
    const NodeId n = bulk_rec(items, count, hk);
    nodes_[n].parent = kNil;
    return n;
  }

  // Minimal set of nodes whose leaf sets partition the one-sided interval.
  // Min-direction pools decompose [bound, inf) (strict: (bound, inf)),
  // max-direction pools the mirror image. `bound` is an item id compared
  // through `less`; it need not be present in the tree.
  template <class Less>
  void canonical(NodeId root, PointId bound, bool strict, const Less& less,
                 std::vector<NodeId>& out) const {
    if (root == kNil) return;
    canonical_rec(root, bound, strict, less, out);
  }

  // As canonical(), but emits nodes through a callback; the hot paths use
  // this to avoid materializing the decomposition.
  template <class Less, class F>
  void canonical_visit(NodeId root, PointId bound, bool strict, const Less& less, F&& f) const {
    if (root == kNil) return;
    canonical_visit_rec(root, bound, strict, less, f);
  }

  // Whole-subtree containment in the (directional) one-sided interval.
  template <class Less>
  bool inside(NodeId n, PointId bound, bool strict, const Less& less) const {
    const PointId e = nodes_[n].extreme;
    if (!max_dir) return strict ? less(bound, e) : !less(e, bound);
    return strict ? less(e, bound) : !less(bound, e);
  }

  // O(1) ancestor-membership: node is in the canonical decomposition iff its
  // subtree is inside the interval and its parent's is not.
  template <class Less>
  bool is_canonical_for(NodeId n, PointId bound, bool strict, const Less& less) const {
    if (!inside(n, bound, strict, less)) return false;
    const NodeId p = nodes_[n].parent;
    return p == kNil || !inside(p, bound, strict, less);
  }

  template <class F>
  void visit_leaves(NodeId n, F&& f) const {
    if (n == kNil) return;
    if (nodes_[n].leaf()) {
      f(n);
      return;
    }
    visit_leaves(nodes_[n].left, f);
    visit_leaves(nodes_[n].right, f);
  }

  template <class F>
  void visit_nodes(NodeId n, F&& f) const {
    if (n == kNil) return;
    f(n);
    if (!nodes_[n].leaf()) {
      visit_nodes(nodes_[n].left, f);
      visit_nodes(nodes_[n].right, f);
    }
  }

  std::vector<PointId> items_of(NodeId n) const {
    std::vector<PointId> out;
    visit_leaves(n, [&](NodeId leaf) { out.push_back(nodes_[leaf].item); });
    return out;
  }

  std::uint32_t height(NodeId n) const {
    if (n == kNil) return 0;
    if (nodes_[n].leaf()) return 1;
    return 1 + std::max(height(nodes_[n].left), height(nodes_[n].right));
  }

  // Structural self-check for tests; throws on violation.
  template <class Less>
  void validate(NodeId root, const Less& less) const {
    if (root == kNil) return;
    GSQ_CHECK(nodes_[root].parent == kNil, "validate: root has a parent");
    validate_rec(root, less);
    std::vector<PointId> items = items_of(root);
    for (std::size_t i = 1; i < items.size(); ++i)
      GSQ_CHECK(less(items[i - 1], items[i]), "validate: leaves out of order");
  }

 private:
  template <class Less, class Hooks>
  void walk_up(NodeId& root, NodeId from, PointId item, bool inserting, const Less& less,
               Hooks& hk) {
    NodeId a = from;
    while (a != kNil) {
      WbNode<Payload>& an = nodes_[a];
      an.size += inserting ? 1 : -1;
      if (!inserting && an.item == item) {
        // the deleted leaf was this ancestor's split router
        NodeId rm = an.left;
        while (!nodes_[rm].leaf()) rm = nodes_[rm].right;
        an.item = nodes_[rm].item;
      }
      refresh_node(a, hk);
      if (inserting)
        hk.assoc_insert(a, item);
      else
        hk.assoc_erase(a, item);
      rebalance(root, a, hk);
      a = nodes_[a].parent;
    }
  }

  NodeId make_leaf(PointId item, NodeId parent) {
    const NodeId n = alloc();
    nodes_[n].parent = parent;
    nodes_[n].size = 1;
    nodes_[n].item = item;
    nodes_[n].extreme = item;
    return n;
  }

  void refresh_node(NodeId a, auto& hk) {
    WbNode<Payload>& an = nodes_[a];
    if (an.leaf()) return;
    const PointId e = nodes_[max_dir ? an.right : an.left].extreme;
    if (e != an.extreme) {
      const PointId old = an.extreme;
      an.extreme = e;
      hk.extreme_changed(a, old);
    }
  }

  bool pair_ok(std::uint64_t l, std::uint64_t r) const {
    const std::uint64_t s = l + r;
    return l * alpha_den >= alpha_num * s && r * alpha_den >= alpha_num * s;
  }

  template <class Hooks>
  void rebalance(NodeId& root, NodeId a, Hooks& hk) {
    WbNode<Payload>& an = nodes_[a];
    if (an.leaf()) return;
    const std::uint64_t sl = nodes_[an.left].size;
    const std::uint64_t sr = nodes_[an.right].size;
    if (pair_ok(sl, sr)) return;
    if (sr > sl) {
      const NodeId r = an.right;
      const std::uint64_t rl = nodes_[nodes_[r].left].size;
      const std::uint64_t rr = nodes_[nodes_[r].right].size;
      if (pair_ok(sl, rl) && pair_ok(sl + rl, rr)) {
        rotate_left(root, a, hk);
      } else {
        rotate_right(root, r, hk);
        rotate_left(root, a, hk);
      }
    } else {
      const NodeId l = an.left;
      const std::uint64_t ll = nodes_[nodes_[l].left].size;
      const std::uint64_t lr = nodes_[nodes_[l].right].size;
      if (pair_ok(lr, sr) && pair_ok(ll, lr + sr)) {
        rotate_right(root, a, hk);
      } else {
        rotate_left(root, l, hk);
        rotate_right(root, a, hk);
      }
    }
    GSQ_CHECK(pair_ok(nodes_[nodes_[a].left].size, nodes_[nodes_[a].right].size),
              "WbTree: rotation failed to restore balance");
  }

  // Left rotation around the edge (a, a.right). The node at the top position
  // keeps its id, subset, and associated structure; the old right child's id
  // is reused for the node whose canonical subset changed, and its associated
  // structure must be rebuilt from scratch.
  template <class Hooks>
  void rotate_left(NodeId& root, NodeId a, Hooks& hk) {
    (void)root;
    WbNode<Payload>& an = nodes_[a];
    const NodeId b = an.right;
    WbNode<Payload>& bn = nodes_[b];
    const NodeId l = an.left, rl = bn.left, rr = bn.right;
    const PointId ex_a = an.extreme, ex_b = bn.extreme;

    bn.left = l;
    bn.right = rl;
    nodes_[l].parent = b;
    nodes_[rl].parent = b;
    bn.size = nodes_[l].size + nodes_[rl].size;
    std::swap(an.item, bn.item);
    bn.extreme = nodes_[max_dir ? bn.right : bn.left].extreme;

    an.left = b;
    an.right = rr;
    nodes_[rr].parent = a;
    an.extreme = nodes_[max_dir ? an.right : an.left].extreme;

    if (bn.extreme != ex_b) hk.extreme_changed(b, ex_b);
    if (an.extreme != ex_a) hk.extreme_changed(a, ex_a);
    hk.assoc_build(b, BuildReason::Rotation);
    hk.children_changed(a);
    hk.parent_input_changed(l, ex_a);
    hk.parent_input_changed(rl, ex_b);
    hk.parent_input_changed(rr, ex_b);
  }

  template <class Hooks>
  void rotate_right(NodeId& root, NodeId a, Hooks& hk) {
    (void)root;
    WbNode<Payload>& an = nodes_[a];
    const NodeId b = an.left;
    WbNode<Payload>& bn = nodes_[b];
    const NodeId r = an.right, lr = bn.right, ll = bn.left;
    const PointId ex_a = an.extreme, ex_b = bn.extreme;

    bn.left = lr;
    bn.right = r;
    nodes_[lr].parent = b;
    nodes_[r].parent = b;
    bn.size = nodes_[lr].size + nodes_[r].size;
    std::swap(an.item, bn.item);
    bn.extreme = nodes_[max_dir ? bn.right : bn.left].extreme;

    an.left = ll;
    an.right = b;
    nodes_[ll].parent = a;
    an.extreme = nodes_[max_dir ? an.right : an.left].extreme;

    if (bn.extreme != ex_b) hk.extreme_changed(b, ex_b);
    if (an.extreme != ex_a) hk.extreme_changed(a, ex_a);
    hk.assoc_build(b, BuildReason::Rotation);
    hk.children_changed(a);
    hk.parent_input_changed(r, ex_a);
    hk.parent_input_changed(lr, ex_b);
    hk.parent_input_changed(ll, ex_b);
  }

  template <class Hooks>
  NodeId bulk_rec(const PointId* items, std::uint32_t count, Hooks& hk) {
    if (count == 1) {
      const NodeId n = make_leaf(items[0], kNil);
      hk.assoc_build(n, BuildReason::Bulk);
      return n;
    }
    const std::uint32_t nl = (count + 1) / 2;
    const NodeId l = bulk_rec(items, nl, hk);
    const NodeId r = bulk_rec(items + nl, count - nl, hk);
    const NodeId n = alloc();
    WbNode<Payload>& nn = nodes_[n];
    nn.left = l;
    nn.right = r;
    nodes_[l].parent = n;
    nodes_[r].parent = n;
    nn.size = count;
    nn.item = items[nl - 1];
    nn.extreme = max_dir ? items[count - 1] : items[0];
    hk.assoc_build(n, BuildReason::Bulk);
    return n;
  }

  template <class Less>
  void canonical_rec(NodeId n, PointId bound, bool strict, const Less& less,
                     std::vector<NodeId>& out) const {
    if (inside(n, bound, strict, less)) {
      out.push_back(n);
      return;
    }
    const WbNode<Payload>& nn = nodes_[n];
    if (nn.leaf()) return;
    if (!max_dir) {
      const bool left_may_contain = strict ? less(bound, nn.item) : !less(nn.item, bound);
      if (left_may_contain) {
        canonical_rec(nn.left, bound, strict, less, out);
        out.push_back(nn.right);  // min(right) > split >= bound
      } else {
        canonical_rec(nn.right, bound, strict, less, out);
      }
    } else {
      if (less(nn.item, bound)) {
        out.push_back(nn.left);  // max(left) <= split < bound
        canonical_rec(nn.right, bound, strict, less, out);
      } else {
        canonical_rec(nn.left, bound, strict, less, out);
      }
    }
  }

  template <class Less, class F>
  void canonical_visit_rec(NodeId n, PointId bound, bool strict, const Less& less, F& f) const {
    if (inside(n, bound, strict, less)) {
      f(n);
      return;
    }
    const WbNode<Payload>& nn = nodes_[n];
    if (nn.leaf()) return;
    if (!max_dir) {
      const bool left_may_contain = strict ? less(bound, nn.item) : !less(nn.item, bound);
      if (left_may_contain) {
        canonical_visit_rec(nn.left, bound, strict, less, f);
        f(nn.right);
      } else {
        canonical_visit_rec(nn.right, bound, strict, less, f);
      }
    } else {
      if (less(nn.item, bound)) {
        f(nn.left);
        canonical_visit_rec(nn.right, bound, strict, less, f);
      } else {
        canonical_visit_rec(nn.left, bound, strict, less, f);
      }
    }
  }

  template <class Less>
  void validate_rec(NodeId n, const Less& less) const {
    const WbNode<Payload>& nn = nodes_[n];
    GSQ_CHECK(nn.alive(), "validate: dead node reachable");
    if (nn.leaf()) {
      GSQ_CHECK(nn.size == 1 && nn.extreme == nn.item, "validate: bad leaf");
      return;
    }
    const WbNode<Payload>& l = nodes_[nn.left];
    const WbNode<Payload>& r = nodes_[nn.right];
    GSQ_CHECK(l.parent == n && r.parent == n, "validate: bad parent link");
    GSQ_CHECK(nn.size == l.size + r.size, "validate: bad size");
    GSQ_CHECK(pair_ok(l.size, r.size), "validate: balance violated");
    NodeId right_most = nn.left;
    while (!nodes_[right_most].leaf()) right_most = nodes_[right_most].right;
    GSQ_CHECK(nn.item == nodes_[right_most].item, "validate: bad split");
    GSQ_CHECK(nn.extreme == (max_dir ? r.extreme : l.extreme), "validate: bad extreme");
    validate_rec(nn.left, less);
    validate_rec(nn.right, less);
  }

  std::vector<WbNode<Payload>> nodes_;
  std::vector<NodeId> free_;
};

}  // namespace gsq
