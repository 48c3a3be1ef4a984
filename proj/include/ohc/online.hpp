#pragma once

// Online hierarchy maintenance: points arrive one at a time and the
// clusterer keeps a binary hierarchy over everything seen so far.
//
//   otd     top-down descent comparing average similarities, O(depth) per point
//   ohac    nearest-neighbour split followed by agglomeration of the pieces
//   naive1  full offline agglomeration after every point
//   naive2  the new point becomes the sibling of its nearest neighbour

#include "ohc/core.hpp"
#include "ohc/linkage.hpp"
#include "ohc/offline.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ohc {

enum class OnlineAlgorithm { Otd, Ohac, Naive1, Naive2 };

std::string_view to_string(OnlineAlgorithm algo);
OnlineAlgorithm parse_online_algorithm(std::string_view name);

/// Ratios avg_intra(A) / avg(A, x) observed wherever the descent left a
/// child A behind while x was closer to the whole subtree than the subtree
/// was to itself.
struct SeparationTrace {
    std::vector<double> ratios;
};

/// Minimum observed ratio clamped to [0, 1]; absent when nothing was observed.
std::optional<double> beta_observed(const SeparationTrace& trace);

/// Tree pieces [y, sibling(y), sibling(parent(y)), ...] along the path from
/// leaf y to the root.  Consumes the hierarchy; subtrees keep their nodes.
Forest split(Hierarchy h, PointIndex y);

/// Index among the first `count` points with the largest similarity to x;
/// the lowest index wins ties.
PointIndex nearest_neighbor(const Dataset& data, std::size_t count, std::span<const double> x,
                            const SimilaritySpec& sim);

class OnlineClusterer {
public:
    OnlineClusterer(OnlineAlgorithm algorithm, std::size_t dim, LinkageSpec linkage, SimilaritySpec similarity);

    /// Adds the next point of the stream as leaf `round()`.
    void insert(std::span<const double> x);

    OnlineAlgorithm algorithm() const { return algorithm_; }
    const Hierarchy& hierarchy() const { return tree_; }
    const Dataset& data() const { return data_; }
    std::size_t round() const { return data_.size(); }
    const LinkageSpec& linkage() const { return linkage_; }
    const SimilaritySpec& similarity() const { return similarity_; }
    const SeparationTrace& separation() const { return separation_; }
    /// Merge trace of the most recent agglomeration (ohac, naive1).
    const MergeTrace& last_merges() const { return last_merges_; }

private:
    void insert_otd(PointIndex leaf, std::span<const double> x);
    void insert_ohac(PointIndex leaf, std::span<const double> x);
    void insert_naive1();
    void insert_naive2(PointIndex leaf, std::span<const double> x);

    OnlineAlgorithm algorithm_;
    LinkageSpec linkage_;
    SimilaritySpec similarity_;
    Dataset data_;
    Hierarchy tree_;
    SeparationTrace separation_;
    MergeTrace last_merges_;
};

}  // namespace ohc
