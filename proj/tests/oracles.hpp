#pragma once

// Slow reference implementations used as oracles by the tests.  They share
// no code with the library beyond reading a Hierarchy through its public
// parent/child accessors.

#include "ohc/core.hpp"
#include "ohc/linkage.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using ohc::Hierarchy;
using ohc::NodeId;
using Points = std::vector<std::vector<double>>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

inline double similarity(ohc::SimilarityKind kind, double shift, const std::vector<double>& a,
                         const std::vector<double>& b) {
    switch (kind) {
        case ohc::SimilarityKind::DotProduct: return dot(a, b);
        case ohc::SimilarityKind::NegativeSqEuclidean: return -sqdist(a, b);
        case ohc::SimilarityKind::ShiftedNegativeSqEuclidean: return shift - sqdist(a, b);
    }
    return 0.0;
}

inline Points rows_of(const ohc::Dataset& d) {
    Points out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto p = d.point(i);
        out.emplace_back(p.begin(), p.end());
    }
    return out;
}

inline ohc::Dataset dataset_of(const Points& pts) { return ohc::Dataset::from_rows(pts); }

using Weights = std::vector<std::vector<double>>;

inline Weights weights_of(const Points& pts, ohc::SimilarityKind kind, double shift = 0.0) {
    const std::size_t n = pts.size();
    Weights w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i][j] = similarity(kind, shift, pts[i], pts[j]);
    return w;
}

inline double pair_sum(const Weights& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) s += w[i][j];
    return s;
}

/// LCA by intersecting explicit ancestor lists.
class AncestorLca {
public:
    explicit AncestorLca(const Hierarchy& h) {
        for (std::size_t i = 0;; ++i) {
            if (!h.contains(i)) break;
            std::vector<NodeId> path;
            for (NodeId v = h.leaf_node(i); v != ohc::kNoNode; v = h.parent(v)) path.push_back(v);
            anc_.push_back(path);
            for (NodeId v : path) ++below_[v];
        }
    }

    std::size_t n() const { return anc_.size(); }

    NodeId lca(std::size_t i, std::size_t j) const {
        for (NodeId a : anc_[i]) {
            if (std::find(anc_[j].begin(), anc_[j].end(), a) != anc_[j].end()) return a;
        }
        return ohc::kNoNode;
    }

    std::size_t lca_size(std::size_t i, std::size_t j) const { return below_.at(lca(i, j)); }

    /// The leaf of {i, j, k} outside the cherry.
    std::size_t outlier(std::size_t i, std::size_t j, std::size_t k) const {
        const std::size_t ij = lca_size(i, j);
        const std::size_t ik = lca_size(i, k);
        const std::size_t jk = lca_size(j, k);
        if (ij < ik && ij < jk) return k;
        if (ik < ij && ik < jk) return j;
        return i;
    }

private:
    std::vector<std::vector<NodeId>> anc_;
    std::map<NodeId, std::size_t> below_;
};

inline double revenue(const Hierarchy& h, const Weights& w) {
    AncestorLca lca(h);
    const std::size_t n = lca.n();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += w[i][j] * static_cast<double>(n - lca.lca_size(i, j));
    return s;
}

inline double cost(const Hierarchy& h, const Weights& w) {
    AncestorLca lca(h);
    const std::size_t n = lca.n();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += w[i][j] * static_cast<double>(lca.lca_size(i, j));
    return s;
}

inline double triplet_distance(const Hierarchy& a, const Hierarchy& b) {
    AncestorLca la(a);
    AncestorLca lb(b);
    const std::size_t n = la.n();
    std::size_t differ = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                ++total;
                if (la.outlier(i, j, k) != lb.outlier(i, j, k)) ++differ;
            }
    return total == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(total);
}

/// Order-free string form: children sorted, so equal strings mean equal trees.
inline std::string canonical(const Hierarchy& h, NodeId v) {
    if (h.is_leaf(v)) return std::to_string(h.node(v).leaf_index);
    std::string l = canonical(h, h.left(v));
    std::string r = canonical(h, h.right(v));
    if (r < l) std::swap(l, r);
    return "(" + l + "," + r + ")";
}

inline std::string canonical(const Hierarchy& h) { return h.empty() ? "" : canonical(h, h.root()); }

inline std::string join_canonical(std::string l, std::string r) {
    if (r < l) std::swap(l, r);
    return "(" + l + "," + r + ")";
}

// ------------------------------------------------------------------ HAC

struct Cluster {
    std::size_t id = 0;
    std::vector<std::size_t> members;
    std::string shape;
};

struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
};

struct HacOutcome {
    std::string shape;
    std::vector<Merge> trace;
};

inline std::vector<double> centroid(const Points& pts, const std::vector<std::size_t>& members) {
    std::vector<double> c(pts[members[0]].size(), 0.0);
    for (auto i : members)
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += pts[i][k];
    for (double& v : c) v /= static_cast<double>(members.size());
    return c;
}

inline double linkage(const Points& pts, ohc::LinkageKind kind, const std::vector<std::size_t>& a,
                      const std::vector<std::size_t>& b) {
    switch (kind) {
        case ohc::LinkageKind::CentroidDot: return dot(centroid(pts, a), centroid(pts, b));
        case ohc::LinkageKind::CentroidL2Sq: return sqdist(centroid(pts, a), centroid(pts, b));
        case ohc::LinkageKind::AverageDot:
        case ohc::LinkageKind::AverageL2Sq: {
            double s = 0.0;
            for (auto i : a)
                for (auto j : b)
                    s += kind == ohc::LinkageKind::AverageDot ? dot(pts[i], pts[j]) : sqdist(pts[i], pts[j]);
            return s / static_cast<double>(a.size() * b.size());
        }
    }
    return 0.0;
}

/// Cubic agglomeration over explicit clusters.  Every step scans all pairs
/// (i < j in creation order) and keeps the first strictly best one.
inline HacOutcome naive_hac(const Points& pts, std::vector<Cluster> clusters, ohc::LinkageKind kind,
                            bool maximize) {
    HacOutcome out;
    std::size_t next = clusters.size();
    while (clusters.size() > 1) {
        std::size_t bi = 0;
        std::size_t bj = 1;
        double best_key = std::numeric_limits<double>::infinity();
        double best_value = 0.0;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double v = linkage(pts, kind, clusters[i].members, clusters[j].members);
                const double key = maximize ? -v : v;
                if (key < best_key) {
                    best_key = key;
                    best_value = v;
                    bi = i;
                    bj = j;
                }
            }
        Cluster merged;
        merged.id = next++;
        merged.members = clusters[bi].members;
        merged.members.insert(merged.members.end(), clusters[bj].members.begin(), clusters[bj].members.end());
        merged.shape = join_canonical(clusters[bi].shape, clusters[bj].shape);
        out.trace.push_back({clusters[bi].id, clusters[bj].id, best_value});
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bi));
        clusters.push_back(std::move(merged));
    }
    out.shape = clusters.empty() ? "" : clusters.front().shape;
    return out;
}

inline HacOutcome naive_hac(const Points& pts, ohc::LinkageKind kind, bool maximize) {
    std::vector<Cluster> init;
    for (std::size_t i = 0; i < pts.size(); ++i) init.push_back({i, {i}, std::to_string(i)});
    return naive_hac(pts, std::move(init), kind, maximize);
}

// ------------------------------------------------------------ online

/// Pointer-free binary tree with explicit member lists, rebuilt by the slow
/// online oracles.
struct Tree {
    struct Node {
        int parent = -1;
        int left = -1;
        int right = -1;
        std::vector<std::size_t> members;
    };
    std::vector<Node> nodes;
    int root = -1;
    std::vector<int> leaf_of;

    bool is_leaf(int v) const { return nodes[v].left < 0; }

    std::string shape(int v) const {
        if (is_leaf(v)) return std::to_string(nodes[v].members[0]);
        return join_canonical(shape(nodes[v].left), shape(nodes[v].right));
    }
    std::string shape() const { return root < 0 ? "" : shape(root); }

    int add_leaf(std::size_t x) {
        nodes.push_back({-1, -1, -1, {x}});
        const int id = static_cast<int>(nodes.size()) - 1;
        if (leaf_of.size() <= x) leaf_of.resize(x + 1, -1);
        leaf_of[x] = id;
        return id;
    }

    // New parent over `at` and a fresh leaf for x.
    void attach(int at, std::size_t x) {
        const int leaf = add_leaf(x);
        const int up = nodes[at].parent;
        Node inner{up, at, leaf, nodes[at].members};
        inner.members.push_back(x);
        nodes.push_back(inner);
        const int id = static_cast<int>(nodes.size()) - 1;
        nodes[at].parent = id;
        nodes[leaf].parent = id;
        if (up < 0) {
            root = id;
        } else {
            (nodes[up].left == at ? nodes[up].left : nodes[up].right) = id;
        }
        for (int v = up; v >= 0; v = nodes[v].parent) nodes[v].members.push_back(x);
    }
};

inline double avg_within(const Points& pts, const std::vector<std::size_t>& m, ohc::SimilarityKind kind,
                         double shift) {
    double s = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b) s += similarity(kind, shift, pts[m[a]], pts[m[b]]);
    return s / (static_cast<double>(m.size()) * static_cast<double>(m.size() - 1) / 2.0);
}

inline double avg_to(const Points& pts, const std::vector<std::size_t>& m, const std::vector<double>& x,
                     ohc::SimilarityKind kind, double shift) {
    double s = 0.0;
    for (auto i : m) s += similarity(kind, shift, pts[i], x);
    return s / static_cast<double>(m.size());
}

struct OtdOutcome {
    std::string shape;
    std::vector<double> ratios;
};

/// Top-down insertion; ties between the children go to the right child.
inline OtdOutcome slow_otd(const Points& pts, ohc::SimilarityKind kind, double shift = 0.0) {
    Tree t;
    OtdOutcome out;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        if (t.root < 0) {
            t.root = t.add_leaf(x);
            continue;
        }
        int cur = t.root;
        while (true) {
            const auto& node = t.nodes[cur];
            if (t.is_leaf(cur) ||
                avg_within(pts, node.members, kind, shift) >= avg_to(pts, node.members, pts[x], kind, shift)) {
                t.attach(cur, x);
                break;
            }
            const int a = node.left;
            const int b = node.right;
            const double to_a = avg_to(pts, t.nodes[a].members, pts[x], kind, shift);
            const double to_b = avg_to(pts, t.nodes[b].members, pts[x], kind, shift);
            const int stay = to_a <= to_b ? a : b;
            const double to_stay = to_a <= to_b ? to_a : to_b;
            if (t.nodes[stay].members.size() >= 2 && to_stay > 0.0) {
                out.ratios.push_back(avg_within(pts, t.nodes[stay].members, kind, shift) / to_stay);
            }
            cur = to_a <= to_b ? b : a;
        }
    }
    out.shape = t.shape();
    return out;
}

inline std::size_t brute_nearest(const Points& pts, std::size_t count, const std::vector<double>& x,
                                 ohc::SimilarityKind kind, double shift) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < count; ++i) {
        if (similarity(kind, shift, pts[i], x) > similarity(kind, shift, pts[best], x)) best = i;
    }
    return best;
}

/// Online agglomeration: split at the nearest neighbour, then rerun the
/// cubic agglomeration over the pieces plus the new point.
inline std::string slow_ohac(const Points& pts, ohc::LinkageKind linkage_kind, bool maximize,
                             ohc::SimilarityKind sim_kind, double shift = 0.0) {
    // Trees are kept as nested member lists: shape string plus children.
    struct Sub {
        std::vector<std::size_t> members;
        std::string shape;
        std::vector<Sub> kids;
    };
    std::function<bool(const Sub&, std::size_t)> holds = [](const Sub& s, std::size_t y) {
        return std::find(s.members.begin(), s.members.end(), y) != s.members.end();
    };
    std::optional<Sub> tree;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        Sub leaf{{x}, std::to_string(x), {}};
        if (!tree) {
            tree = leaf;
            continue;
        }
        const std::size_t y = brute_nearest(pts, x, pts[x], sim_kind, shift);
        // Pieces along the path from y up: [y, sibling(y), sibling(parent), ...].
        std::vector<Sub> path;
        Sub cur = *tree;
        std::vector<Sub> siblings;
        while (!cur.kids.empty()) {
            const bool left = holds(cur.kids[0], y);
            siblings.push_back(cur.kids[left ? 1 : 0]);
            Sub next = cur.kids[left ? 0 : 1];
            cur = std::move(next);
        }
        std::vector<Sub> pieces{cur};
        for (auto it = siblings.rbegin(); it != siblings.rend(); ++it) pieces.push_back(*it);
        pieces.push_back(leaf);

        std::vector<Cluster> init;
        for (std::size_t i = 0; i < pieces.size(); ++i) init.push_back({i, pieces[i].members, pieces[i].shape});
        // Replay the merges to rebuild nested structure.
        const HacOutcome merged = naive_hac(pts, init, linkage_kind, maximize);
        std::vector<std::optional<Sub>> by_id(pieces.size() * 2);
        for (std::size_t i = 0; i < pieces.size(); ++i) by_id[i] = pieces[i];
        std::size_t next = pieces.size();
        for (const auto& m : merged.trace) {
            Sub a = *by_id[m.left];
            Sub b = *by_id[m.right];
            Sub c;
            c.members = a.members;
            c.members.insert(c.members.end(), b.members.begin(), b.members.end());
            c.shape = join_canonical(a.shape, b.shape);
            c.kids = {std::move(a), std::move(b)};
            by_id[next++] = std::move(c);
        }
        tree = *by_id[next - 1];
    }
    return tree ? tree->shape : "";
}

inline std::string slow_naive2(const Points& pts, ohc::SimilarityKind kind, double shift = 0.0) {
    Tree t;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        if (t.root < 0) {
            t.root = t.add_leaf(x);
            continue;
        }
        t.attach(t.leaf_of[brute_nearest(pts, x, pts[x], kind, shift)], x);
    }
    return t.shape();
}

// ------------------------------------------------------------ optimum

/// Revenue of every binary tree over `leaves`, counting only pairs inside it,
/// for a problem of `n` points.  (2k-3)!! entries for k leaves.
inline std::vector<double> all_tree_revenues(const std::vector<std::size_t>& leaves, const Weights& w,
                                             std::size_t n) {
    if (leaves.size() == 1) return {0.0};
    std::vector<double> out;
    const std::size_t k = leaves.size();
    // The first leaf always goes left, so each split is seen once.
    for (std::size_t mask = 0; mask < (std::size_t{1} << (k - 1)); ++mask) {
        std::vector<std::size_t> left{leaves[0]};
        std::vector<std::size_t> right;
        for (std::size_t b = 1; b < k; ++b) (mask >> (b - 1) & 1 ? left : right).push_back(leaves[b]);
        if (right.empty()) continue;
        double cross = 0.0;
        for (auto i : left)
            for (auto j : right) cross += w[i][j];
        const double here = cross * static_cast<double>(n - k);
        const auto ls = all_tree_revenues(left, w, n);
        const auto rs = all_tree_revenues(right, w, n);
        for (double a : ls)
            for (double b : rs) out.push_back(here + a + b);
    }
    return out;
}

inline double optimal_revenue(const Weights& w) {
    std::vector<std::size_t> leaves(w.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i] = i;
    const auto all = all_tree_revenues(leaves, w, w.size());
    return *std::max_element(all.begin(), all.end());
}

// ------------------------------------------------------------ helpers

inline Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Points p(n, std::vector<double>(d));
    for (auto& row : p)
        for (double& v : row) v = u(rng);
    return p;
}

inline Points random_int_points(std::mt19937_64& rng, std::size_t n, std::size_t d, int lo, int hi) {
    std::uniform_int_distribution<int> u(lo, hi);
    Points p(n, std::vector<double>(d));
    for (auto& row : p)
        for (double& v : row) v = u(rng);
    return p;
}

}  // namespace oracle
