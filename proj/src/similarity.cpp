#include "ohc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ohc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

Dataset::Dataset(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("dataset dimension must be positive");
}

Dataset::Dataset(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
    if (dim == 0) throw std::invalid_argument("dataset dimension must be positive");
    if (values_.size() % dim != 0) throw std::invalid_argument("value count is not a multiple of the dimension");
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("cannot infer dimension from zero rows");
    Dataset data(rows.front().size());
    for (const auto& r : rows) data.append(r);
    return data;
}

std::span<const double> Dataset::point(PointIndex i) const {
    if (i >= size()) throw NotFoundError("point index " + std::to_string(i) + " out of range");
    return std::span<const double>(values_).subspan(i * dim_, dim_);
}

PointIndex Dataset::append(std::span<const double> x) {
    if (dim_ == 0) throw std::invalid_argument("dataset has no dimension");
    require_same_dim(dim_, x.size());
    values_.insert(values_.end(), x.begin(), x.end());
    return size() - 1;
}

Dataset Dataset::prefix(std::size_t count) const {
    if (count > size()) throw std::invalid_argument("prefix longer than dataset");
    return Dataset(dim_, std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count * dim_)));
}

double SimilaritySpec::operator()(std::span<const double> x, std::span<const double> y) const {
    require_same_dim(x.size(), y.size());
    if (kind == SimilarityKind::DotProduct) return dot(x, y);
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        d2 += diff * diff;
    }
    return kind == SimilarityKind::NegativeSqEuclidean ? -d2 : shift - d2;
}

double SimilaritySpec::covering_shift(const Dataset& data) {
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < data.dim(); ++k) {
        double lo = data.point(0)[k];
        double hi = lo;
        for (PointIndex i = 1; i < data.size(); ++i) {
            lo = std::min(lo, data.point(i)[k]);
            hi = std::max(hi, data.point(i)[k]);
        }
        total += (hi - lo) * (hi - lo);
    }
    // Rounding in the pairwise evaluation may exceed the exact diagonal.
    return total * (1.0 + 1e-12);
}

std::string_view to_string(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::DotProduct: return "dot-product";
        case SimilarityKind::NegativeSqEuclidean: return "negative-sq-euclidean";
        case SimilarityKind::ShiftedNegativeSqEuclidean: return "shifted-negative-sq-euclidean";
    }
    return "?";
}

SimilarityKind parse_similarity_kind(std::string_view name) {
    for (auto k : {SimilarityKind::DotProduct, SimilarityKind::NegativeSqEuclidean,
                   SimilarityKind::ShiftedNegativeSqEuclidean}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown similarity '" + std::string(name) +
                                "' (valid: dot-product, negative-sq-euclidean, shifted-negative-sq-euclidean)");
}

double MomentsView::total_sq() const { return std::accumulate(sum_sq.begin(), sum_sq.end(), 0.0); }

ClusterMoments ClusterMoments::of_point(std::span<const double> x) {
    ClusterMoments m(x.size());
    m.add_point(x);
    return m;
}

ClusterMoments ClusterMoments::of_points(const Dataset& data, std::span<const PointIndex> members) {
    ClusterMoments m(data.dim());
    for (PointIndex i : members) m.add_point(data.point(i));
    return m;
}

void ClusterMoments::add_point(std::span<const double> x) {
    require_same_dim(dim(), x.size());
    ++count;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sum[k] += x[k];
        sum_sq[k] += x[k] * x[k];
    }
}

ClusterMoments& ClusterMoments::operator+=(const MomentsView& other) {
    require_same_dim(dim(), other.sum.size());
    count += other.count;
    for (std::size_t k = 0; k < dim(); ++k) {
        sum[k] += other.sum[k];
        sum_sq[k] += other.sum_sq[k];
    }
    return *this;
}

ClusterMoments& ClusterMoments::operator+=(const ClusterMoments& other) { return *this += other.view(); }

ClusterMoments operator+(ClusterMoments a, const ClusterMoments& b) {
    a += b;
    return a;
}

double cross_similarity_sum(const SimilaritySpec& sim, const MomentsView& a, const MomentsView& b) {
    require_same_dim(a.sum.size(), b.sum.size());
    const double ab = dot(a.sum, b.sum);
    if (sim.kind == SimilarityKind::DotProduct) return ab;
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double dist = nb * a.total_sq() + na * b.total_sq() - 2.0 * ab;
    return sim.kind == SimilarityKind::NegativeSqEuclidean ? -dist : sim.shift * na * nb - dist;
}

namespace {

// Twice the intra-cluster pair sum; exact for integer data under the dot
// product, which keeps the mean bit-identical to a pair-by-pair computation.
double twice_intra_sum(const SimilaritySpec& sim, const MomentsView& a) {
    const double norm2 = dot(a.sum, a.sum);
    const double sq = a.total_sq();
    if (sim.kind == SimilarityKind::DotProduct) return norm2 - sq;
    const double n = static_cast<double>(a.count);
    const double dist = 2.0 * (n * sq - norm2);
    if (sim.kind == SimilarityKind::NegativeSqEuclidean) return -dist;
    return sim.shift * n * (n - 1.0) - dist;
}

}  // namespace

double intra_similarity_sum(const SimilaritySpec& sim, const MomentsView& a) {
    if (a.count < 2) return 0.0;
    return 0.5 * twice_intra_sum(sim, a);
}

double average_intra(const SimilaritySpec& sim, const MomentsView& a) {
    if (a.count < 2) throw std::domain_error("average intra-cluster similarity needs at least two points");
    const double n = static_cast<double>(a.count);
    return twice_intra_sum(sim, a) / (n * (n - 1.0));
}

double average_inter(const SimilaritySpec& sim, const MomentsView& a, const MomentsView& b) {
    if (a.count == 0 || b.count == 0) throw std::invalid_argument("average similarity of an empty cluster");
    return cross_similarity_sum(sim, a, b) / (static_cast<double>(a.count) * static_cast<double>(b.count));
}

double average_to_point(const SimilaritySpec& sim, const MomentsView& a, std::span<const double> x) {
    if (a.count == 0) throw std::invalid_argument("average similarity of an empty cluster");
    require_same_dim(a.sum.size(), x.size());
    const double ax = dot(a.sum, x);
    const double n = static_cast<double>(a.count);
    if (sim.kind == SimilarityKind::DotProduct) return ax / n;
    const double dist = a.total_sq() + n * dot(x, x) - 2.0 * ax;
    const double total = sim.kind == SimilarityKind::NegativeSqEuclidean ? -dist : sim.shift * n - dist;
    return total / n;
}

}  // namespace ohc
