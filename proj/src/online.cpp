#include "ohc/online.hpp"

#include <algorithm>
#include <string>

namespace ohc {

std::string_view to_string(OnlineAlgorithm algo) {
    switch (algo) {
        case OnlineAlgorithm::Otd: return "otd";
        case OnlineAlgorithm::Ohac: return "ohac";
        case OnlineAlgorithm::Naive1: return "naive1";
        case OnlineAlgorithm::Naive2: return "naive2";
    }
    return "?";
}

OnlineAlgorithm parse_online_algorithm(std::string_view name) {
    for (auto a : {OnlineAlgorithm::Otd, OnlineAlgorithm::Ohac, OnlineAlgorithm::Naive1, OnlineAlgorithm::Naive2}) {
        if (to_string(a) == name) return a;
    }
    throw std::invalid_argument("unknown online algorithm '" + std::string(name) +
                                "' (valid: otd, ohac, naive1, naive2)");
}

std::optional<double> beta_observed(const SeparationTrace& trace) {
    if (trace.ratios.empty()) return std::nullopt;
    const double lowest = *std::min_element(trace.ratios.begin(), trace.ratios.end());
    return std::clamp(lowest, 0.0, 1.0);
}

Forest split(Hierarchy h, PointIndex y) {
    if (!h.contains(y)) throw std::invalid_argument("split point " + std::to_string(y) + " is not a leaf");
    Forest f{std::move(h), {}};
    f.roots = f.arena.split_at(y);
    return f;
}

PointIndex nearest_neighbor(const Dataset& data, std::size_t count, std::span<const double> x,
                            const SimilaritySpec& sim) {
    if (count == 0 || count > data.size()) throw std::invalid_argument("nearest neighbour over an empty prefix");
    PointIndex best = 0;
    double best_sim = sim(data.point(0), x);
    for (PointIndex i = 1; i < count; ++i) {
        const double s = sim(data.point(i), x);
        if (s > best_sim) {
            best = i;
            best_sim = s;
        }
    }
    return best;
}

OnlineClusterer::OnlineClusterer(OnlineAlgorithm algorithm, std::size_t dim, LinkageSpec linkage,
                                 SimilaritySpec similarity)
    : algorithm_(algorithm), linkage_(linkage), similarity_(similarity), data_(dim), tree_(dim) {}

void OnlineClusterer::insert(std::span<const double> x) {
    const PointIndex leaf = data_.size();
    if (x.size() != data_.dim()) throw std::invalid_argument("point dimension does not match the stream");
    switch (algorithm_) {
        case OnlineAlgorithm::Otd: insert_otd(leaf, x); break;
        case OnlineAlgorithm::Ohac: insert_ohac(leaf, x); break;
        case OnlineAlgorithm::Naive2: insert_naive2(leaf, x); break;
        case OnlineAlgorithm::Naive1: break;
    }
    data_.append(x);
    if (algorithm_ == OnlineAlgorithm::Naive1) insert_naive1();
}

void OnlineClusterer::insert_otd(PointIndex leaf, std::span<const double> x) {
    if (tree_.empty()) {
        tree_.add_leaf(leaf, x);
        return;
    }
    NodeId cur = tree_.root();
    while (true) {
        if (tree_.is_leaf(cur) || average_intra(similarity_, tree_.moments(cur)) >=
                                      average_to_point(similarity_, tree_.moments(cur), x)) {
            tree_.attach_sibling(cur, leaf, x);
            return;
        }
        const NodeId a = tree_.left(cur);
        const NodeId b = tree_.right(cur);
        const double to_a = average_to_point(similarity_, tree_.moments(a), x);
        const double to_b = average_to_point(similarity_, tree_.moments(b), x);
        // Equal averages descend right.
        const bool go_right = to_a <= to_b;
        const NodeId left_behind = go_right ? a : b;
        const double to_left_behind = go_right ? to_a : to_b;
        if (tree_.count(left_behind) >= 2 && to_left_behind > 0.0) {
            separation_.ratios.push_back(average_intra(similarity_, tree_.moments(left_behind)) / to_left_behind);
        }
        cur = go_right ? b : a;
    }
}

void OnlineClusterer::insert_ohac(PointIndex leaf, std::span<const double> x) {
    if (tree_.empty()) {
        tree_.add_leaf(leaf, x);
        return;
    }
    const PointIndex y = nearest_neighbor(data_, data_.size(), x, similarity_);
    Forest forest = split(std::move(tree_), y);
    forest.roots.push_back(forest.arena.add_leaf(leaf, x));
    HacResult merged = hac_forest(std::move(forest), linkage_);
    tree_ = std::move(merged.tree);
    last_merges_ = std::move(merged.trace);
}

void OnlineClusterer::insert_naive1() {
    HacResult merged = hac(data_, linkage_);
    tree_ = std::move(merged.tree);
    last_merges_ = std::move(merged.trace);
}

void OnlineClusterer::insert_naive2(PointIndex leaf, std::span<const double> x) {
    if (tree_.empty()) {
        tree_.add_leaf(leaf, x);
        return;
    }
    const PointIndex y = nearest_neighbor(data_, data_.size(), x, similarity_);
    tree_.attach_sibling(tree_.leaf_node(y), leaf, x);
}

}  // namespace ohc
