#include "ohc/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "json.hpp"

namespace ohc {

namespace {

double pairs_of(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

void check_covers(const Hierarchy& h, std::size_t n) {
    if (n < 2) throw std::invalid_argument("objectives need at least two points");
    if (h.size() != n) {
        throw std::invalid_argument("hierarchy has " + std::to_string(h.size()) + " leaves but the data has " +
                                    std::to_string(n) + " points");
    }
    for (PointIndex i = 0; i < n; ++i) {
        if (!h.contains(i)) throw std::invalid_argument("hierarchy is missing point " + std::to_string(i));
    }
}

struct NodeTotals {
    double revenue = 0.0;
    double cost = 0.0;
    double weight = 0.0;
};

NodeTotals node_totals(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim) {
    const std::size_t n = data.size();
    check_covers(h, n);
    const std::size_t d = data.dim();
    std::vector<double> sums(h.capacity() * d, 0.0);
    std::vector<double> sqs(h.capacity() * d, 0.0);
    for (PointIndex i = 0; i < n; ++i) {
        const NodeId id = h.leaf_node(i);
        const auto x = data.point(i);
        for (std::size_t k = 0; k < d; ++k) {
            sums[id * d + k] = x[k];
            sqs[id * d + k] = x[k] * x[k];
        }
    }
    auto view = [&](NodeId id) {
        return MomentsView{h.count(id), std::span<const double>(sums).subspan(id * d, d),
                           std::span<const double>(sqs).subspan(id * d, d)};
    };
    NodeTotals t;
    for (NodeId v : h.postorder(h.root())) {
        const NodeId l = h.left(v);
        const NodeId r = h.right(v);
        for (std::size_t k = 0; k < d; ++k) {
            sums[v * d + k] = sums[l * d + k] + sums[r * d + k];
            sqs[v * d + k] = sqs[l * d + k] + sqs[r * d + k];
        }
        const double cross = cross_similarity_sum(sim, view(l), view(r));
        const double size = static_cast<double>(h.count(v));
        t.revenue += (static_cast<double>(n) - size) * cross;
        t.cost += size * cross;
        t.weight += cross;
    }
    return t;
}

NodeTotals node_totals(const Hierarchy& h, const WeightMatrix& w) {
    const std::size_t n = w.size();
    check_covers(h, n);
    NodeTotals t;
    for (NodeId v : h.postorder(h.root())) {
        const auto left = h.leaves(h.left(v));
        const auto right = h.leaves(h.right(v));
        double cross = 0.0;
        for (PointIndex i : left) {
            for (PointIndex j : right) cross += w(i, j);
        }
        const double size = static_cast<double>(h.count(v));
        t.revenue += (static_cast<double>(n) - size) * cross;
        t.cost += size * cross;
        t.weight += cross;
    }
    return t;
}

RevenueReport make_report(std::size_t n, double total, double weight, bool nonnegative) {
    RevenueReport r;
    r.n = n;
    r.total = total;
    r.per_pair = total / pairs_of(n);
    r.max_revenue = max_revenue(n, weight);
    if (n > 2 && nonnegative && r.max_revenue > 0.0) r.fraction_of_max = total / r.max_revenue;
    return r;
}

PointIndex resolve_with(const LcaIndex& idx, PointIndex i, PointIndex j, PointIndex k) {
    const std::size_t dij = idx.depth(idx.lca(i, j));
    const std::size_t dik = idx.depth(idx.lca(i, k));
    const std::size_t djk = idx.depth(idx.lca(j, k));
    if (dij > dik && dij > djk) return k;
    if (dik > dij && dik > djk) return j;
    return i;
}

void check_same_leaves(const Hierarchy& t1, const Hierarchy& t2) {
    if (t2.size() < 3) throw std::invalid_argument("triplet distance needs at least three leaves");
    if (t1.size() != t2.size()) throw std::invalid_argument("hierarchies have different leaf counts");
    for (PointIndex leaf : t2.leaves()) {
        if (!t1.contains(leaf)) throw std::invalid_argument("leaf " + std::to_string(leaf) + " missing from t1");
    }
}

}  // namespace

WeightMatrix WeightMatrix::from_points(const Dataset& data, const SimilaritySpec& sim) {
    WeightMatrix w(data.size());
    for (PointIndex i = 0; i < data.size(); ++i) {
        for (PointIndex j = i + 1; j < data.size(); ++j) w.set(i, j, sim(data.point(i), data.point(j)));
    }
    return w;
}

double WeightMatrix::pair_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) s += (*this)(i, j);
    }
    return s;
}

bool WeightMatrix::all_nonnegative() const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if ((*this)(i, j) < 0.0) return false;
        }
    }
    return true;
}

double max_revenue(std::size_t n, double pair_weight_sum) {
    if (n < 2) return 0.0;
    return static_cast<double>(n - 2) * pair_weight_sum;
}

bool similarities_nonnegative(const Dataset& data, const SimilaritySpec& sim) {
    const std::size_t n = data.size();
    if (n < 2) return true;
    const auto values = data.values();
    switch (sim.kind) {
        case SimilarityKind::NegativeSqEuclidean:
            for (PointIndex i = 1; i < n; ++i) {
                if (!std::equal(data.point(i).begin(), data.point(i).end(), data.point(0).begin())) return false;
            }
            return true;
        case SimilarityKind::ShiftedNegativeSqEuclidean:
            if (sim.shift >= SimilaritySpec::covering_shift(data)) return true;
            break;
        case SimilarityKind::DotProduct:
            if (std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; })) return true;
            break;
    }
    for (PointIndex i = 0; i < n; ++i) {
        for (PointIndex j = i + 1; j < n; ++j) {
            if (sim(data.point(i), data.point(j)) < 0.0) return false;
        }
    }
    return true;
}

RevenueReport mw_revenue(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim) {
    const NodeTotals t = node_totals(h, data, sim);
    return make_report(data.size(), t.revenue, t.weight, similarities_nonnegative(data, sim));
}

RevenueReport mw_revenue(const Hierarchy& h, const WeightMatrix& w) {
    const NodeTotals t = node_totals(h, w);
    return make_report(w.size(), t.revenue, t.weight, w.all_nonnegative());
}

double dasgupta_cost(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim) {
    return node_totals(h, data, sim).cost;
}

double dasgupta_cost(const Hierarchy& h, const WeightMatrix& w) { return node_totals(h, w).cost; }

double mw_revenue_by_pairs(const Hierarchy& h, const WeightMatrix& w) {
    const std::size_t n = w.size();
    check_covers(h, n);
    const LcaIndex idx(h);
    double total = 0.0;
    for (PointIndex i = 0; i < n; ++i) {
        for (PointIndex j = i + 1; j < n; ++j) {
            total += w(i, j) * static_cast<double>(n - h.count(idx.lca(i, j)));
        }
    }
    return total;
}

double dasgupta_cost_by_pairs(const Hierarchy& h, const WeightMatrix& w) {
    const std::size_t n = w.size();
    check_covers(h, n);
    const LcaIndex idx(h);
    double total = 0.0;
    for (PointIndex i = 0; i < n; ++i) {
        for (PointIndex j = i + 1; j < n; ++j) total += w(i, j) * static_cast<double>(h.count(idx.lca(i, j)));
    }
    return total;
}

RevenueReport mw_revenue_sampled(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim,
                                 std::size_t samples, std::uint64_t seed, SampleMode mode) {
    if (samples == 0) throw std::invalid_argument("sample count must be positive");
    const std::size_t n = data.size();
    check_covers(h, n);
    const LcaIndex idx(h);
    const double pairs = pairs_of(n);

    bool nonnegative = true;
    double sum = 0.0;
    double sum_sq = 0.0;
    auto contribution = [&](PointIndex i, PointIndex j) {
        const double w = sim(data.point(i), data.point(j));
        nonnegative = nonnegative && w >= 0.0;
        return w * static_cast<double>(n - h.count(idx.lca(i, j)));
    };

    RevenueReport r;
    if (mode == SampleMode::Exhaustive) {
        samples = n * (n - 1) / 2;
        for (PointIndex i = 0; i < n; ++i) {
            for (PointIndex j = i + 1; j < n; ++j) sum += contribution(i, j);
        }
        r = make_report(n, sum, 0.0, nonnegative);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<PointIndex> first(0, n - 1);
        std::uniform_int_distribution<PointIndex> second(0, n - 2);
        for (std::size_t s = 0; s < samples; ++s) {
            const PointIndex i = first(rng);
            PointIndex j = second(rng);
            if (j >= i) ++j;
            const double c = contribution(i, j);
            sum += c;
            sum_sq += c * c;
        }
        const double m = static_cast<double>(samples);
        const double mean = sum / m;
        const double var = samples > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
        r = make_report(n, pairs * mean, 0.0, nonnegative);
        r.standard_error = pairs * std::sqrt(var / m);
    }
    // Pair weight total from moments: O(n d) regardless of the sample count.
    double weight = intra_similarity_sum(sim, ClusterMoments::of_points(data, h.leaves()));
    r.max_revenue = max_revenue(n, weight);
    r.fraction_of_max.reset();
    if (n > 2 && nonnegative && r.max_revenue > 0.0) r.fraction_of_max = r.total / r.max_revenue;
    r.sampling = Sampling{samples, seed};
    return r;
}

PointIndex resolve_triple(const Hierarchy& h, PointIndex i, PointIndex j, PointIndex k) {
    if (i == j || i == k || j == k) throw std::invalid_argument("triple needs three distinct leaves");
    for (PointIndex p : {i, j, k}) {
        if (!h.contains(p)) throw std::invalid_argument("leaf " + std::to_string(p) + " is not in the hierarchy");
    }
    return resolve_with(LcaIndex(h), i, j, k);
}

TripletReport triplet_distance(const Hierarchy& t1, const Hierarchy& t2) {
    check_same_leaves(t1, t2);
    const std::size_t n = t2.size();
    const LcaIndex lca2(t2);
    const auto leaves2 = t2.leaves();
    const PointIndex max_leaf = *std::max_element(leaves2.begin(), leaves2.end());
    const auto post2 = t2.postorder(t2.root());

    std::vector<char> marked(max_leaf + 1, 0);
    std::vector<std::size_t> inside(t2.capacity(), 0);
    std::uint64_t shared = 0;

    // For each pair with LCA u in t1 and LCA v in t2, both trees put k
    // outside the pair exactly when k avoids leaves(u) and leaves(v).
    for (NodeId u : t1.postorder(t1.root())) {
        const auto left = t1.leaves(t1.left(u));
        const auto right = t1.leaves(t1.right(u));
        for (PointIndex p : left) marked[p] = 1;
        for (PointIndex p : right) marked[p] = 1;
        for (PointIndex p : leaves2) inside[t2.leaf_node(p)] = marked[p];
        for (NodeId v : post2) inside[v] = inside[t2.left(v)] + inside[t2.right(v)];
        const std::size_t size_u = t1.count(u);
        for (PointIndex a : left) {
            for (PointIndex b : right) {
                const NodeId v = lca2.lca(a, b);
                shared += n - size_u - t2.count(v) + inside[v];
            }
        }
        for (PointIndex p : left) marked[p] = 0;
        for (PointIndex p : right) marked[p] = 0;
    }
    const double nn = static_cast<double>(n);
    const double triples = nn * (nn - 1.0) * (nn - 2.0) / 6.0;
    TripletReport r;
    r.n = n;
    r.distance = (triples - static_cast<double>(shared)) / triples;
    return r;
}

TripletReport triplet_distance_sampled(const Hierarchy& t1, const Hierarchy& t2, std::size_t samples,
                                       std::uint64_t seed, SampleMode mode) {
    if (samples == 0) throw std::invalid_argument("sample count must be positive");
    check_same_leaves(t1, t2);
    const std::size_t n = t2.size();
    const LcaIndex lca1(t1);
    const LcaIndex lca2(t2);
    const auto leaves = t2.leaves();
    const double nn = static_cast<double>(n);
    const double triples = nn * (nn - 1.0) * (nn - 2.0) / 6.0;

    TripletReport r;
    r.n = n;
    auto differs = [&](PointIndex a, PointIndex b, PointIndex c) {
        return resolve_with(lca1, a, b, c) != resolve_with(lca2, a, b, c);
    };
    if (mode == SampleMode::Exhaustive) {
        r.sampling = Sampling{n * (n - 1) * (n - 2) / 6, seed};
        std::uint64_t missing = 0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                for (std::size_t c = b + 1; c < n; ++c) missing += differs(leaves[a], leaves[b], leaves[c]);
            }
        }
        r.distance = static_cast<double>(missing) / triples;
        return r;
    }
    r.sampling = Sampling{samples, seed};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t missing = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        std::size_t c = pick(rng);
        while (b == a) b = pick(rng);
        while (c == a || c == b) c = pick(rng);
        missing += differs(leaves[a], leaves[b], leaves[c]);
    }
    const double m = static_cast<double>(samples);
    r.distance = static_cast<double>(missing) / m;
    r.standard_error = std::sqrt(r.distance * (1.0 - r.distance) / m);
    return r;
}

namespace {

nlohmann::json sampling_json(const std::optional<Sampling>& s) {
    if (!s) return "exact";
    return {{"samples", s->samples}, {"seed", s->seed}};
}

}  // namespace

std::string to_json(const RevenueReport& r) {
    nlohmann::json j{{"metric", "mw-revenue"},
                     {"n", r.n},
                     {"total", r.total},
                     {"per_pair", r.per_pair},
                     {"max_revenue", r.max_revenue},
                     {"method", sampling_json(r.sampling)},
                     {"standard_error", r.standard_error}};
    j["fraction_of_max"] = r.fraction_of_max ? nlohmann::json(*r.fraction_of_max) : nlohmann::json(nullptr);
    return j.dump();
}

std::string to_json(const TripletReport& r) {
    nlohmann::json j{{"metric", "triplet"},
                     {"n", r.n},
                     {"distance", r.distance},
                     {"method", sampling_json(r.sampling)},
                     {"standard_error", r.standard_error}};
    return j.dump();
}

}  // namespace ohc
