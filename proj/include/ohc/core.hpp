#pragma once

// Data model shared by every algorithm: datasets, similarity functions,
// cluster moments and the binary hierarchy.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ohc {

using PointIndex = std::size_t;
using NodeId = std::size_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

class NotFoundError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Append-only collection of equal-dimension points stored row-major.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim);
    Dataset(std::size_t dim, std::vector<double> values);

    static Dataset from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
    bool empty() const { return values_.empty(); }

    std::span<const double> point(PointIndex i) const;
    std::span<const double> values() const { return values_; }

    /// Returns the index of the appended point.
    PointIndex append(std::span<const double> x);

    /// First `count` points as a new dataset.
    Dataset prefix(std::size_t count) const;

    bool operator==(const Dataset&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

enum class SimilarityKind {
    DotProduct,
    NegativeSqEuclidean,
    ShiftedNegativeSqEuclidean,
};

/// Pairwise similarity (larger = closer).  The shifted kind evaluates
/// `shift - |x - y|^2`.
struct SimilaritySpec {
    SimilarityKind kind = SimilarityKind::DotProduct;
    double shift = 0.0;

    static SimilaritySpec dot_product() { return {SimilarityKind::DotProduct, 0.0}; }
    static SimilaritySpec negative_sq_euclidean() { return {SimilarityKind::NegativeSqEuclidean, 0.0}; }
    static SimilaritySpec shifted_negative_sq_euclidean(double c) {
        return {SimilarityKind::ShiftedNegativeSqEuclidean, c};
    }

    double operator()(std::span<const double> x, std::span<const double> y) const;

    /// Smallest shift that makes the shifted kind nonnegative on `data`
    /// (squared diagonal of the bounding box).
    static double covering_shift(const Dataset& data);
};

std::string_view to_string(SimilarityKind kind);
SimilarityKind parse_similarity_kind(std::string_view name);

/// Non-owning view of (m0, m1, m2).
struct MomentsView {
    std::size_t count = 0;
    std::span<const double> sum;
    std::span<const double> sum_sq;

    /// Sum of m2 over coordinates, i.e. the total squared norm of the cluster.
    double total_sq() const;
};

/// Count, coordinate-wise sum and coordinate-wise sum of squares of a cluster.
struct ClusterMoments {
    std::size_t count = 0;
    std::vector<double> sum;
    std::vector<double> sum_sq;

    ClusterMoments() = default;
    explicit ClusterMoments(std::size_t dim) : sum(dim, 0.0), sum_sq(dim, 0.0) {}

    static ClusterMoments of_point(std::span<const double> x);
    static ClusterMoments of_points(const Dataset& data, std::span<const PointIndex> members);

    std::size_t dim() const { return sum.size(); }
    void add_point(std::span<const double> x);
    ClusterMoments& operator+=(const ClusterMoments& other);
    ClusterMoments& operator+=(const MomentsView& other);

    MomentsView view() const { return {count, sum, sum_sq}; }
    operator MomentsView() const { return view(); }
};

ClusterMoments operator+(ClusterMoments a, const ClusterMoments& b);

/// Sum of similarities over all cross pairs (i in a, j in b).
double cross_similarity_sum(const SimilaritySpec& sim, const MomentsView& a, const MomentsView& b);
/// Sum of similarities over all unordered pairs inside a.
double intra_similarity_sum(const SimilaritySpec& sim, const MomentsView& a);
/// Mean pairwise similarity inside a; requires a.count >= 2.
double average_intra(const SimilaritySpec& sim, const MomentsView& a);
/// Mean cross-pair similarity between a and b; requires both nonempty.
double average_inter(const SimilaritySpec& sim, const MomentsView& a, const MomentsView& b);
/// Mean similarity between the members of a and the single point x.
double average_to_point(const SimilaritySpec& sim, const MomentsView& a, std::span<const double> x);

/// Rooted binary tree over point indices, stored in an index arena.
///
/// Every node caches its leaf count and the moments of the points below it.
/// A hierarchy built without coordinates (dim 0) only tracks counts.  Nodes
/// without a parent that are not the root are "detached": they arise while a
/// tree is split into a forest and are reassembled with `join`.
class Hierarchy {
public:
    struct Node {
        NodeId parent = kNoNode;
        NodeId left = kNoNode;
        NodeId right = kNoNode;
        PointIndex leaf_index = 0;
        std::size_t count = 0;
        bool is_leaf() const { return left == kNoNode; }
    };

    explicit Hierarchy(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    bool empty() const { return root_ == kNoNode; }
    NodeId root() const { return root_; }
    /// Number of leaves under the root (0 for an empty tree).
    std::size_t size() const;

    const Node& node(NodeId id) const;
    bool is_leaf(NodeId id) const { return node(id).is_leaf(); }
    NodeId parent(NodeId id) const { return node(id).parent; }
    NodeId left(NodeId id) const { return node(id).left; }
    NodeId right(NodeId id) const { return node(id).right; }
    NodeId sibling(NodeId id) const;
    std::size_t count(NodeId id) const { return node(id).count; }
    MomentsView moments(NodeId id) const;

    /// Upper bound on node ids; ids of freed nodes below it are not valid.
    std::size_t capacity() const { return nodes_.size(); }
    bool is_live(NodeId id) const;

    bool contains(PointIndex leaf) const;
    /// Node holding `leaf`; throws NotFoundError when absent.
    NodeId leaf_node(PointIndex leaf) const;

    /// Deepest node whose subtree holds both leaves.
    NodeId lca(PointIndex i, PointIndex j) const;
    NodeId lca_nodes(NodeId a, NodeId b) const;
    std::size_t depth(NodeId id) const;
    std::size_t height() const;
    bool is_ancestor(NodeId ancestor, NodeId id) const;

    /// Leaf indices under `id` in left-to-right order.
    std::vector<PointIndex> leaves(NodeId id) const;
    std::vector<PointIndex> leaves() const;
    /// Internal nodes under `id`, children before parents.
    std::vector<NodeId> postorder(NodeId id) const;

    /// Creates a parentless leaf.  The first node of an empty tree becomes its
    /// root.
    NodeId add_leaf(PointIndex leaf, std::span<const double> x = {});

    /// Puts a new internal node in the slot of `at` with children
    /// (at, new leaf) and updates every ancestor.  `at == kNoNode` is only
    /// allowed on an empty tree and creates a single-leaf tree.  Returns the
    /// new leaf node.
    NodeId attach_sibling(NodeId at, PointIndex leaf, std::span<const double> x = {});

    /// New internal node over two parentless subtrees.  It becomes the root
    /// when either argument was the root.
    NodeId join(NodeId a, NodeId b);

    void set_root(NodeId id);

    /// Removes the ancestors of `leaf` and returns the detached subtrees
    /// [leaf, sibling(leaf), sibling(parent), ...] up to the old root.  The
    /// tree has no root afterwards.
    std::vector<NodeId> split_at(PointIndex leaf);

    /// Copies the subtree `id` of `other` into this arena as a parentless
    /// subtree and returns its new root.
    NodeId adopt(const Hierarchy& other, NodeId id);

    /// Recomputes every cached moment from `data` and switches dim to
    /// data.dim().
    void recompute_moments(const Dataset& data);

    /// Throws std::logic_error describing the first broken invariant.
    void validate() const;

private:
    NodeId allocate();
    void release(NodeId id);
    void check_dim(std::span<const double> x) const;
    std::span<double> sum_of(NodeId id);
    std::span<double> sq_of(NodeId id);
    void set_leaf_node(PointIndex leaf, NodeId id);
    void add_moments(NodeId into, NodeId from);
    void set_point_moments(NodeId id, std::span<const double> x);

    std::size_t dim_ = 0;
    NodeId root_ = kNoNode;
    std::vector<Node> nodes_;
    std::vector<char> live_;
    std::vector<double> sums_;
    std::vector<double> sqs_;
    std::vector<NodeId> free_;
    std::vector<NodeId> leaf_nodes_;
};

/// Structure-only copy in which leaf i becomes leaf mapping[i].
Hierarchy relabel_leaves(const Hierarchy& h, std::span<const PointIndex> mapping);

/// O(1)-per-query depth table plus parent-walk LCA for a fixed hierarchy.
class LcaIndex {
public:
    explicit LcaIndex(const Hierarchy& h);

    NodeId lca(PointIndex i, PointIndex j) const;
    std::size_t depth(NodeId id) const { return depth_[id]; }
    const Hierarchy& tree() const { return *tree_; }

private:
    const Hierarchy* tree_;
    std::vector<std::size_t> depth_;
};

/// Mean similarity inside node `v`; requires count(v) >= 2.
double avg_intra(const Hierarchy& h, NodeId v, const SimilaritySpec& sim);
/// Mean similarity across two disjoint nodes.
double avg_inter(const Hierarchy& h, NodeId a, NodeId b, const SimilaritySpec& sim);
/// Mean similarity between node `a` and a point.
double avg_inter(const Hierarchy& h, NodeId a, std::span<const double> x, const SimilaritySpec& sim);

}  // namespace ohc
