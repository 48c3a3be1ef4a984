#pragma once

#include "ohc/core.hpp"
#include "ohc/linkage.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ohc {

/// Disjoint parentless subtrees living in one arena.  Roots are the initial
/// clusters of an agglomeration, in creation order.
struct Forest {
    Hierarchy arena;
    std::vector<NodeId> roots;

    /// One singleton subtree per point, in index order.
    static Forest singletons(const Dataset& data);
    /// Copies each tree into a shared arena; throws on overlapping leaves.
    static Forest from_trees(const std::vector<Hierarchy>& trees);
};

/// One merge of the agglomeration.  Ids are creation indices: the initial
/// clusters are 0..m-1 and merge s creates cluster m+s.
struct MergeStep {
    std::size_t left_id = 0;
    std::size_t right_id = 0;
    double linkage = 0.0;

    bool operator==(const MergeStep&) const = default;
};

using MergeTrace = std::vector<MergeStep>;

struct HacResult {
    Hierarchy tree;
    MergeTrace trace;
};

/// Agglomerates the forest roots into one tree.  Among pairs with equal
/// merge key the lexicographically smallest (creation id, creation id) pair
/// wins.  Subtree internals are left untouched.
HacResult hac_forest(Forest forest, const LinkageSpec& spec);

/// Agglomerative clustering from singletons.
HacResult hac(const Dataset& data, const LinkageSpec& spec);

/// Merges two uniformly chosen remaining clusters until one is left.
Hierarchy random_tree(std::size_t n, std::uint64_t seed);

/// CSV with columns step,left_id,right_id,linkage_value.
void write_trace_csv(std::ostream& out, const MergeTrace& trace);

}  // namespace ohc
