#pragma once

// Moment-based cluster linkages.  Each kind is evaluated in O(d) from the
// moments of the two clusters, which makes all-pairs evaluation over m
// clusters O(m^2 d) once moments are known.

#include "ohc/core.hpp"

#include <string_view>
#include <vector>

namespace ohc {

enum class LinkageKind {
    CentroidDot,   // mu(C)^T mu(D)
    AverageDot,    // mean of x^T y over cross pairs
    AverageL2Sq,   // mean of |x - y|^2 over cross pairs
    CentroidL2Sq,  // |mu(C) - mu(D)|^2
};

enum class Orientation {
    Maximize,  // similarity: merge the largest value
    Minimize,  // distance: merge the smallest value
};

struct LinkageSpec {
    LinkageKind kind = LinkageKind::AverageL2Sq;
    Orientation orientation = Orientation::Minimize;

    /// Spec with the natural orientation of `kind` (dot kinds maximize).
    static LinkageSpec of(LinkageKind kind);

    /// Maps a value to a key where smaller is always better.
    double merge_key(double value) const { return orientation == Orientation::Maximize ? -value : value; }
};

std::string_view to_string(LinkageKind kind);
std::string_view to_string(Orientation orientation);
LinkageKind parse_linkage_kind(std::string_view name);
Orientation parse_orientation(std::string_view name);
Orientation default_orientation(LinkageKind kind);
/// Similarity whose average-linkage optimum the linkage tracks.
SimilaritySpec matching_similarity(LinkageKind kind);

double linkage_value(const LinkageSpec& spec, const MomentsView& a, const MomentsView& b);

/// Strict upper triangle of an m x m symmetric matrix, row-major
/// (same layout as a condensed distance matrix).
class CondensedMatrix {
public:
    CondensedMatrix() = default;
    explicit CondensedMatrix(std::size_t m) : m_(m), values_(m < 2 ? 0 : m * (m - 1) / 2, 0.0) {}

    std::size_t order() const { return m_; }
    std::size_t size() const { return values_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values_[offset(i, j)]; }
    double& at(std::size_t i, std::size_t j) { return values_[offset(i, j)]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t offset(std::size_t i, std::size_t j) const;

    std::size_t m_ = 0;
    std::vector<double> values_;
};

CondensedMatrix pairwise_linkages(const LinkageSpec& spec, std::span<const MomentsView> clusters);

}  // namespace ohc
