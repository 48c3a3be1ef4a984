#include "ohc/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ohc {

namespace {

std::string id_str(NodeId id) { return std::to_string(id); }

}  // namespace

std::size_t Hierarchy::size() const { return root_ == kNoNode ? 0 : nodes_[root_].count; }

const Hierarchy::Node& Hierarchy::node(NodeId id) const {
    if (!is_live(id)) throw NotFoundError("no node with id " + id_str(id));
    return nodes_[id];
}

bool Hierarchy::is_live(NodeId id) const { return id < nodes_.size() && live_[id] != 0; }

NodeId Hierarchy::sibling(NodeId id) const {
    const NodeId p = node(id).parent;
    if (p == kNoNode) return kNoNode;
    return nodes_[p].left == id ? nodes_[p].right : nodes_[p].left;
}

MomentsView Hierarchy::moments(NodeId id) const {
    const Node& n = node(id);
    const std::span<const double> sums(sums_);
    const std::span<const double> sqs(sqs_);
    return {n.count, sums.subspan(id * dim_, dim_), sqs.subspan(id * dim_, dim_)};
}

std::span<double> Hierarchy::sum_of(NodeId id) { return std::span<double>(sums_).subspan(id * dim_, dim_); }
std::span<double> Hierarchy::sq_of(NodeId id) { return std::span<double>(sqs_).subspan(id * dim_, dim_); }

bool Hierarchy::contains(PointIndex leaf) const {
    return leaf < leaf_nodes_.size() && leaf_nodes_[leaf] != kNoNode;
}

NodeId Hierarchy::leaf_node(PointIndex leaf) const {
    if (!contains(leaf)) throw NotFoundError("leaf " + std::to_string(leaf) + " is not in the hierarchy");
    return leaf_nodes_[leaf];
}

std::size_t Hierarchy::depth(NodeId id) const {
    std::size_t d = 0;
    for (NodeId p = node(id).parent; p != kNoNode; p = nodes_[p].parent) ++d;
    return d;
}

NodeId Hierarchy::lca_nodes(NodeId a, NodeId b) const {
    std::size_t da = depth(a);
    std::size_t db = depth(b);
    while (da > db) { a = nodes_[a].parent; --da; }
    while (db > da) { b = nodes_[b].parent; --db; }
    while (a != b) {
        a = nodes_[a].parent;
        b = nodes_[b].parent;
        if (a == kNoNode || b == kNoNode) throw std::invalid_argument("nodes belong to different subtrees");
    }
    return a;
}

NodeId Hierarchy::lca(PointIndex i, PointIndex j) const {
    if (i == j) throw std::invalid_argument("lca needs two distinct leaves");
    return lca_nodes(leaf_node(i), leaf_node(j));
}

bool Hierarchy::is_ancestor(NodeId ancestor, NodeId id) const {
    node(ancestor);
    for (NodeId cur = id; cur != kNoNode; cur = node(cur).parent) {
        if (cur == ancestor) return true;
    }
    return false;
}

std::size_t Hierarchy::height() const {
    if (root_ == kNoNode) return 0;
    std::size_t best = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[id];
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.emplace_back(n.right, d + 1);
            stack.emplace_back(n.left, d + 1);
        }
    }
    return best;
}

std::vector<PointIndex> Hierarchy::leaves(NodeId id) const {
    std::vector<PointIndex> out;
    out.reserve(node(id).count);
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.is_leaf()) {
            out.push_back(n.leaf_index);
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return out;
}

std::vector<PointIndex> Hierarchy::leaves() const {
    return root_ == kNoNode ? std::vector<PointIndex>{} : leaves(root_);
}

std::vector<NodeId> Hierarchy::postorder(NodeId id) const {
    std::vector<NodeId> out;
    std::vector<std::pair<NodeId, bool>> stack{{id, false}};
    node(id);
    while (!stack.empty()) {
        auto [cur, expanded] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[cur];
        if (n.is_leaf()) continue;
        if (expanded) {
            out.push_back(cur);
        } else {
            stack.emplace_back(cur, true);
            stack.emplace_back(n.right, false);
            stack.emplace_back(n.left, false);
        }
    }
    return out;
}

NodeId Hierarchy::allocate() {
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = Node{};
        live_[id] = 1;
        std::fill(sums_.begin() + static_cast<std::ptrdiff_t>(id * dim_),
                  sums_.begin() + static_cast<std::ptrdiff_t>((id + 1) * dim_), 0.0);
        std::fill(sqs_.begin() + static_cast<std::ptrdiff_t>(id * dim_),
                  sqs_.begin() + static_cast<std::ptrdiff_t>((id + 1) * dim_), 0.0);
    } else {
        id = nodes_.size();
        nodes_.emplace_back();
        live_.push_back(1);
        sums_.resize(sums_.size() + dim_, 0.0);
        sqs_.resize(sqs_.size() + dim_, 0.0);
    }
    return id;
}

void Hierarchy::release(NodeId id) {
    live_[id] = 0;
    free_.push_back(id);
}

void Hierarchy::check_dim(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", hierarchy expects " +
                                    std::to_string(dim_));
    }
}

void Hierarchy::set_leaf_node(PointIndex leaf, NodeId id) {
    if (leaf >= leaf_nodes_.size()) leaf_nodes_.resize(leaf + 1, kNoNode);
    leaf_nodes_[leaf] = id;
}

void Hierarchy::set_point_moments(NodeId id, std::span<const double> x) {
    auto s = sum_of(id);
    auto q = sq_of(id);
    for (std::size_t k = 0; k < dim_; ++k) {
        s[k] = x[k];
        q[k] = x[k] * x[k];
    }
}

void Hierarchy::add_moments(NodeId into, NodeId from) {
    for (std::size_t k = 0; k < dim_; ++k) {
        sums_[into * dim_ + k] += sums_[from * dim_ + k];
        sqs_[into * dim_ + k] += sqs_[from * dim_ + k];
    }
}

NodeId Hierarchy::add_leaf(PointIndex leaf, std::span<const double> x) {
    check_dim(x);
    if (contains(leaf)) throw std::invalid_argument("leaf " + std::to_string(leaf) + " is already present");
    const bool first = nodes_.size() == free_.size();
    const NodeId id = allocate();
    nodes_[id].leaf_index = leaf;
    nodes_[id].count = 1;
    set_point_moments(id, x);
    set_leaf_node(leaf, id);
    if (first) root_ = id;
    return id;
}

NodeId Hierarchy::attach_sibling(NodeId at, PointIndex leaf, std::span<const double> x) {
    if (at == kNoNode) {
        if (nodes_.size() != free_.size()) throw std::invalid_argument("attach point required on a nonempty tree");
        return add_leaf(leaf, x);
    }
    node(at);
    check_dim(x);
    if (contains(leaf)) throw std::invalid_argument("leaf " + std::to_string(leaf) + " is already present");

    const NodeId fresh = allocate();
    nodes_[fresh].leaf_index = leaf;
    nodes_[fresh].count = 1;
    set_point_moments(fresh, x);
    set_leaf_node(leaf, fresh);

    const NodeId inner = allocate();
    const NodeId up = nodes_[at].parent;
    nodes_[inner].parent = up;
    nodes_[inner].left = at;
    nodes_[inner].right = fresh;
    nodes_[inner].count = nodes_[at].count + 1;
    add_moments(inner, at);
    add_moments(inner, fresh);
    if (up != kNoNode) {
        (nodes_[up].left == at ? nodes_[up].left : nodes_[up].right) = inner;
    }
    if (root_ == at) root_ = inner;
    nodes_[at].parent = inner;
    nodes_[fresh].parent = inner;

    for (NodeId p = up; p != kNoNode; p = nodes_[p].parent) {
        ++nodes_[p].count;
        add_moments(p, fresh);
    }
    return fresh;
}

NodeId Hierarchy::join(NodeId a, NodeId b) {
    if (a == b) throw std::invalid_argument("cannot join a subtree with itself");
    if (node(a).parent != kNoNode || node(b).parent != kNoNode) {
        throw std::invalid_argument("join needs two parentless subtrees");
    }
    const NodeId inner = allocate();
    nodes_[inner].left = a;
    nodes_[inner].right = b;
    nodes_[inner].count = nodes_[a].count + nodes_[b].count;
    add_moments(inner, a);
    add_moments(inner, b);
    nodes_[a].parent = inner;
    nodes_[b].parent = inner;
    if (root_ == a || root_ == b) root_ = inner;
    return inner;
}

void Hierarchy::set_root(NodeId id) {
    if (node(id).parent != kNoNode) throw std::invalid_argument("root must not have a parent");
    root_ = id;
}

std::vector<NodeId> Hierarchy::split_at(PointIndex leaf) {
    const NodeId y = leaf_node(leaf);
    std::vector<NodeId> parts{y};
    NodeId child = y;
    NodeId p = nodes_[y].parent;
    nodes_[y].parent = kNoNode;
    while (p != kNoNode) {
        const NodeId s = nodes_[p].left == child ? nodes_[p].right : nodes_[p].left;
        nodes_[s].parent = kNoNode;
        parts.push_back(s);
        const NodeId up = nodes_[p].parent;
        release(p);
        child = p;
        p = up;
    }
    if (root_ == y || !is_live(root_)) root_ = kNoNode;
    return parts;
}

NodeId Hierarchy::adopt(const Hierarchy& other, NodeId id) {
    other.node(id);
    if (other.dim_ != dim_) throw std::invalid_argument("cannot adopt a subtree of a different dimension");
    for (PointIndex leaf : other.leaves(id)) {
        if (contains(leaf)) throw std::invalid_argument("leaf " + std::to_string(leaf) + " is already present");
    }
    // Post-order copy; the copy of a child is on top of `built` when its
    // parent is processed.
    std::vector<NodeId> built;
    std::vector<std::pair<NodeId, bool>> stack{{id, false}};
    while (!stack.empty()) {
        auto [cur, expanded] = stack.back();
        stack.pop_back();
        const Node& src = other.nodes_[cur];
        if (!src.is_leaf() && !expanded) {
            stack.emplace_back(cur, true);
            stack.emplace_back(src.right, false);
            stack.emplace_back(src.left, false);
            continue;
        }
        const NodeId copy = allocate();
        nodes_[copy].count = src.count;
        nodes_[copy].leaf_index = src.leaf_index;
        auto m = other.moments(cur);
        std::copy(m.sum.begin(), m.sum.end(), sum_of(copy).begin());
        std::copy(m.sum_sq.begin(), m.sum_sq.end(), sq_of(copy).begin());
        if (src.is_leaf()) {
            set_leaf_node(src.leaf_index, copy);
        } else {
            const NodeId r = built.back();
            built.pop_back();
            const NodeId l = built.back();
            built.pop_back();
            nodes_[copy].left = l;
            nodes_[copy].right = r;
            nodes_[l].parent = copy;
            nodes_[r].parent = copy;
        }
        built.push_back(copy);
    }
    return built.back();
}

void Hierarchy::recompute_moments(const Dataset& data) {
    dim_ = data.dim();
    sums_.assign(nodes_.size() * dim_, 0.0);
    sqs_.assign(nodes_.size() * dim_, 0.0);
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (!live_[id] || nodes_[id].parent != kNoNode) continue;
        for (PointIndex leaf : leaves(id)) set_point_moments(leaf_nodes_[leaf], data.point(leaf));
        for (NodeId inner : postorder(id)) {
            add_moments(inner, nodes_[inner].left);
            add_moments(inner, nodes_[inner].right);
        }
    }
}

void Hierarchy::validate() const {
    auto fail = [](const std::string& what) { throw std::logic_error("invalid hierarchy: " + what); };
    if (root_ != kNoNode) {
        if (!is_live(root_)) fail("root is not a live node");
        if (nodes_[root_].parent != kNoNode) fail("root has a parent");
    }
    std::size_t leaf_total = 0;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (!live_[id]) continue;
        const Node& n = nodes_[id];
        if ((n.left == kNoNode) != (n.right == kNoNode)) fail("node " + id_str(id) + " has exactly one child");
        if (n.is_leaf()) {
            ++leaf_total;
            if (n.count != 1) fail("leaf " + id_str(id) + " has count " + std::to_string(n.count));
            if (!contains(n.leaf_index) || leaf_nodes_[n.leaf_index] != id) {
                fail("leaf index map is inconsistent at node " + id_str(id));
            }
        } else {
            if (n.left == n.right) fail("node " + id_str(id) + " has the same child twice");
            for (NodeId c : {n.left, n.right}) {
                if (!is_live(c)) fail("node " + id_str(id) + " has a dead child");
                if (nodes_[c].parent != id) fail("child " + id_str(c) + " does not point back to " + id_str(id));
            }
            if (n.count != nodes_[n.left].count + nodes_[n.right].count) {
                fail("leaf count mismatch at node " + id_str(id));
            }
        }
        if (n.parent != kNoNode && !is_live(n.parent)) fail("node " + id_str(id) + " has a dead parent");
        std::size_t steps = 0;
        for (NodeId p = n.parent; p != kNoNode; p = nodes_[p].parent) {
            if (++steps > nodes_.size()) fail("parent chain of node " + id_str(id) + " is cyclic");
        }
    }
    std::size_t mapped = 0;
    for (NodeId id : leaf_nodes_) mapped += id != kNoNode;
    if (mapped != leaf_total) fail("leaf index map has stale entries");
}

Hierarchy relabel_leaves(const Hierarchy& h, std::span<const PointIndex> mapping) {
    Hierarchy out;
    if (h.empty()) return out;
    std::vector<NodeId> built;
    std::vector<std::pair<NodeId, bool>> stack{{h.root(), false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (h.is_leaf(id)) {
            const PointIndex leaf = h.node(id).leaf_index;
            if (leaf >= mapping.size()) throw std::invalid_argument("relabel mapping does not cover leaf " + std::to_string(leaf));
            built.push_back(out.add_leaf(mapping[leaf]));
        } else if (expanded) {
            const NodeId r = built.back();
            built.pop_back();
            const NodeId l = built.back();
            built.pop_back();
            built.push_back(out.join(l, r));
        } else {
            stack.emplace_back(id, true);
            stack.emplace_back(h.right(id), false);
            stack.emplace_back(h.left(id), false);
        }
    }
    out.set_root(built.back());
    return out;
}

LcaIndex::LcaIndex(const Hierarchy& h) : tree_(&h), depth_(h.capacity(), 0) {
    if (h.empty()) return;
    std::vector<NodeId> stack{h.root()};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const auto& n = h.node(id);
        if (n.is_leaf()) continue;
        depth_[n.left] = depth_[id] + 1;
        depth_[n.right] = depth_[id] + 1;
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
}

NodeId LcaIndex::lca(PointIndex i, PointIndex j) const {
    if (i == j) throw std::invalid_argument("lca needs two distinct leaves");
    NodeId a = tree_->leaf_node(i);
    NodeId b = tree_->leaf_node(j);
    while (depth_[a] > depth_[b]) a = tree_->node(a).parent;
    while (depth_[b] > depth_[a]) b = tree_->node(b).parent;
    while (a != b) {
        a = tree_->node(a).parent;
        b = tree_->node(b).parent;
    }
    return a;
}

double avg_intra(const Hierarchy& h, NodeId v, const SimilaritySpec& sim) {
    return average_intra(sim, h.moments(v));
}

double avg_inter(const Hierarchy& h, NodeId a, NodeId b, const SimilaritySpec& sim) {
    if (h.is_ancestor(a, b) || h.is_ancestor(b, a)) {
        throw std::invalid_argument("average inter-cluster similarity needs disjoint clusters");
    }
    return average_inter(sim, h.moments(a), h.moments(b));
}

double avg_inter(const Hierarchy& h, NodeId a, std::span<const double> x, const SimilaritySpec& sim) {
    return average_to_point(sim, h.moments(a), x);
}

}  // namespace ohc
