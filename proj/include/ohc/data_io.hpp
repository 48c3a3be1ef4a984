#pragma once

#include "ohc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ohc {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Isotropic Gaussian mixture.  Centers are uniform in [0, separation]^dim,
/// point i belongs to component i mod clusters, and the points are shuffled
/// before they are returned.
struct GmmSpec {
    std::size_t clusters = 1;
    std::size_t dim = 2;
    std::size_t n = 1000;
    double spread = 1.0;
    double separation = 10.0;
    std::uint64_t seed = 0;
};

struct LabeledDataset {
    Dataset data;
    std::vector<int> labels;
};

LabeledDataset generate_gmm(const GmmSpec& spec);

/// Points uniform in the unit hypercube.
Dataset generate_uniform(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Permutes the rows of `data` (and `labels` when nonempty) with a seeded
/// shuffle.
LabeledDataset shuffled(const LabeledDataset& in, std::uint64_t seed);

/// Numeric CSV, one point per row.  With `has_labels` the last column is an
/// integer label kept out of the coordinates.
LabeledDataset read_csv(std::istream& in, bool has_labels = false);
LabeledDataset load_csv(const std::filesystem::path& path, bool has_labels = false);
void write_csv(std::ostream& out, const Dataset& data, const std::vector<int>& labels = {});
void save_csv(const std::filesystem::path& path, const Dataset& data, const std::vector<int>& labels = {});

/// {"n": leaves, "nodes": [{"id", "left", "right"} | {"id", "leaf_index"}], "root": id}
/// Node ids are renumbered densely in post-order.
std::string tree_to_json(const Hierarchy& h);
/// Validates the document and rebuilds a structure-only hierarchy (dim 0).
Hierarchy tree_from_json(const std::string& text);
void save_tree(const Hierarchy& h, const std::filesystem::path& path);
Hierarchy load_tree(const std::filesystem::path& path);
/// Structure only, leaf labels are point indices, e.g. "(0,(1,2));".
std::string to_newick(const Hierarchy& h);

}  // namespace ohc
