#include "ohc/linkage.hpp"

#include <stdexcept>
#include <string>

namespace ohc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace

LinkageSpec LinkageSpec::of(LinkageKind kind) { return {kind, default_orientation(kind)}; }

std::string_view to_string(LinkageKind kind) {
    switch (kind) {
        case LinkageKind::CentroidDot: return "centroid-dot";
        case LinkageKind::AverageDot: return "average-dot";
        case LinkageKind::AverageL2Sq: return "average-l2sq";
        case LinkageKind::CentroidL2Sq: return "centroid-l2sq";
    }
    return "?";
}

std::string_view to_string(Orientation orientation) {
    return orientation == Orientation::Maximize ? "maximize" : "minimize";
}

LinkageKind parse_linkage_kind(std::string_view name) {
    for (auto k : {LinkageKind::CentroidDot, LinkageKind::AverageDot, LinkageKind::AverageL2Sq,
                   LinkageKind::CentroidL2Sq}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown linkage '" + std::string(name) +
                                "' (valid: centroid-dot, average-dot, average-l2sq, centroid-l2sq)");
}

Orientation parse_orientation(std::string_view name) {
    if (name == "maximize") return Orientation::Maximize;
    if (name == "minimize") return Orientation::Minimize;
    throw std::invalid_argument("unknown orientation '" + std::string(name) + "' (valid: maximize, minimize)");
}

Orientation default_orientation(LinkageKind kind) {
    return kind == LinkageKind::CentroidDot || kind == LinkageKind::AverageDot ? Orientation::Maximize
                                                                               : Orientation::Minimize;
}

SimilaritySpec matching_similarity(LinkageKind kind) {
    return default_orientation(kind) == Orientation::Maximize ? SimilaritySpec::dot_product()
                                                              : SimilaritySpec::negative_sq_euclidean();
}

double linkage_value(const LinkageSpec& spec, const MomentsView& a, const MomentsView& b) {
    if (a.count == 0 || b.count == 0) throw std::invalid_argument("linkage of an empty cluster");
    if (a.sum.size() != b.sum.size()) throw std::invalid_argument("linkage of clusters with different dimensions");
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    switch (spec.kind) {
        case LinkageKind::AverageDot:
            return dot(a.sum, b.sum) / (na * nb);
        case LinkageKind::CentroidDot: {
            double s = 0.0;
            for (std::size_t k = 0; k < a.sum.size(); ++k) s += (a.sum[k] / na) * (b.sum[k] / nb);
            return s;
        }
        case LinkageKind::AverageL2Sq:
            return a.total_sq() / na + b.total_sq() / nb - 2.0 * dot(a.sum, b.sum) / (na * nb);
        case LinkageKind::CentroidL2Sq: {
            double s = 0.0;
            for (std::size_t k = 0; k < a.sum.size(); ++k) {
                const double diff = a.sum[k] / na - b.sum[k] / nb;
                s += diff * diff;
            }
            return s;
        }
    }
    throw std::logic_error("unhandled linkage kind");
}

std::size_t CondensedMatrix::offset(std::size_t i, std::size_t j) const {
    if (i == j || i >= m_ || j >= m_) throw std::out_of_range("condensed matrix index");
    if (i > j) std::swap(i, j);
    return i * m_ - i * (i + 1) / 2 + (j - i - 1);
}

CondensedMatrix pairwise_linkages(const LinkageSpec& spec, std::span<const MomentsView> clusters) {
    if (clusters.size() < 2) throw std::invalid_argument("pairwise linkages need at least two clusters");
    CondensedMatrix out(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) out.at(i, j) = linkage_value(spec, clusters[i], clusters[j]);
    }
    return out;
}

}  // namespace ohc
