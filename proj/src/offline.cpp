#include "ohc/offline.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <tuple>

namespace ohc {

Forest Forest::singletons(const Dataset& data) {
    Forest f{Hierarchy(data.dim()), {}};
    f.roots.reserve(data.size());
    for (PointIndex i = 0; i < data.size(); ++i) f.roots.push_back(f.arena.add_leaf(i, data.point(i)));
    return f;
}

Forest Forest::from_trees(const std::vector<Hierarchy>& trees) {
    const std::size_t dim = trees.empty() ? 0 : trees.front().dim();
    Forest f{Hierarchy(dim), {}};
    for (const auto& t : trees) {
        if (t.empty()) continue;
        f.roots.push_back(f.arena.adopt(t, t.root()));
    }
    return f;
}

namespace {

constexpr double kNoCandidate = std::numeric_limits<double>::infinity();

// Generic agglomeration with a lazily invalidated priority queue.  For every
// active cluster i the queue holds the best merge partner among active
// clusters created after i; entries whose partner has since been merged are
// lower bounds and get refreshed when they reach the top.
class Agglomerator {
public:
    Agglomerator(Hierarchy& arena, const LinkageSpec& spec, std::size_t initial)
        : arena_(arena),
          spec_(spec),
          node_of_(2 * initial - 1, kNoNode),
          alive_(2 * initial - 1, 0),
          next_(2 * initial, kEnd),
          prev_(2 * initial, kEnd),
          partner_(2 * initial - 1, kEnd),
          key_(2 * initial - 1, kNoCandidate),
          value_(2 * initial - 1, 0.0),
          version_(2 * initial - 1, 0) {}

    MergeTrace run(const std::vector<NodeId>& roots) {
        const std::size_t m = roots.size();
        for (std::size_t i = 0; i < m; ++i) {
            node_of_[i] = roots[i];
            alive_[i] = 1;
            link_back(i);
        }
        for (std::size_t i = 0; i < m; ++i) refresh(i);

        MergeTrace trace;
        trace.reserve(m - 1);
        std::size_t created = m;
        while (created < node_of_.size()) {
            const std::size_t a = pop_best();
            const std::size_t b = partner_[a];
            const std::size_t c = created++;
            trace.push_back({a, b, value_[a]});
            node_of_[c] = arena_.join(node_of_[a], node_of_[b]);
            unlink(a);
            unlink(b);
            alive_[a] = alive_[b] = 0;
            alive_[c] = 1;
            const MomentsView mc = arena_.moments(node_of_[c]);
            for (std::size_t i = head_; i != kEnd; i = next_[i]) {
                const double v = linkage_value(spec_, arena_.moments(node_of_[i]), mc);
                const double k = spec_.merge_key(v);
                if (k < key_[i]) set_candidate(i, c, k, v);
            }
            link_back(c);
        }
        arena_.set_root(node_of_[created - 1]);
        return trace;
    }

private:
    static constexpr std::size_t kEnd = std::numeric_limits<std::size_t>::max();
    using Entry = std::tuple<double, std::size_t, std::uint32_t>;

    void link_back(std::size_t id) {
        prev_[id] = tail_;
        next_[id] = kEnd;
        if (tail_ == kEnd) {
            head_ = id;
        } else {
            next_[tail_] = id;
        }
        tail_ = id;
    }

    void unlink(std::size_t id) {
        (prev_[id] == kEnd ? head_ : next_[prev_[id]]) = next_[id];
        (next_[id] == kEnd ? tail_ : prev_[next_[id]]) = prev_[id];
    }

    void set_candidate(std::size_t i, std::size_t j, double key, double value) {
        partner_[i] = j;
        key_[i] = key;
        value_[i] = value;
        ++version_[i];
        queue_.emplace(key, i, version_[i]);
    }

    // Best partner of i among active clusters created after it; the
    // earliest-created partner wins ties.
    void refresh(std::size_t i) {
        partner_[i] = kEnd;
        key_[i] = kNoCandidate;
        ++version_[i];
        const MomentsView mi = arena_.moments(node_of_[i]);
        std::size_t best = kEnd;
        double best_key = kNoCandidate;
        double best_value = 0.0;
        for (std::size_t j = next_[i]; j != kEnd; j = next_[j]) {
            const double v = linkage_value(spec_, mi, arena_.moments(node_of_[j]));
            const double k = spec_.merge_key(v);
            if (best == kEnd || k < best_key) {
                best = j;
                best_key = k;
                best_value = v;
            }
        }
        if (best != kEnd) set_candidate(i, best, best_key, best_value);
    }

    std::size_t pop_best() {
        while (!queue_.empty()) {
            const auto [key, i, version] = queue_.top();
            queue_.pop();
            if (!alive_[i] || version != version_[i]) continue;
            if (!alive_[partner_[i]]) {
                refresh(i);
                continue;
            }
            return i;
        }
        throw std::logic_error("agglomeration ran out of candidate pairs");
    }

    Hierarchy& arena_;
    const LinkageSpec& spec_;
    std::vector<NodeId> node_of_;
    std::vector<char> alive_;
    std::vector<std::size_t> next_;
    std::vector<std::size_t> prev_;
    std::size_t head_ = kEnd;
    std::size_t tail_ = kEnd;
    std::vector<std::size_t> partner_;
    std::vector<double> key_;
    std::vector<double> value_;
    std::vector<std::uint32_t> version_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
};

void check_roots(const Hierarchy& arena, const std::vector<NodeId>& roots) {
    std::vector<NodeId> sorted(roots);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("forest lists the same subtree twice");
    }
    for (NodeId r : roots) {
        if (!arena.is_live(r)) throw std::invalid_argument("forest root " + std::to_string(r) + " does not exist");
        if (arena.parent(r) != kNoNode) {
            throw std::invalid_argument("forest root " + std::to_string(r) + " lies inside another subtree");
        }
    }
}

}  // namespace

HacResult hac_forest(Forest forest, const LinkageSpec& spec) {
    check_roots(forest.arena, forest.roots);
    HacResult result{std::move(forest.arena), {}};
    if (forest.roots.empty()) return result;
    if (forest.roots.size() == 1) {
        result.tree.set_root(forest.roots.front());
        return result;
    }
    Agglomerator agg(result.tree, spec, forest.roots.size());
    result.trace = agg.run(forest.roots);
    return result;
}

HacResult hac(const Dataset& data, const LinkageSpec& spec) {
    if (data.empty()) return {Hierarchy(data.dim()), {}};
    return hac_forest(Forest::singletons(data), spec);
}

Hierarchy random_tree(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("random tree needs at least one leaf");
    Hierarchy h;
    std::vector<NodeId> roots;
    roots.reserve(n);
    for (PointIndex i = 0; i < n; ++i) roots.push_back(h.add_leaf(i));
    std::mt19937_64 rng(seed);
    while (roots.size() > 1) {
        std::uniform_int_distribution<std::size_t> first(0, roots.size() - 1);
        std::uniform_int_distribution<std::size_t> second(0, roots.size() - 2);
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        const NodeId joined = h.join(roots[i], roots[j]);
        roots[std::min(i, j)] = joined;
        roots[std::max(i, j)] = roots.back();
        roots.pop_back();
    }
    h.set_root(roots.front());
    return h;
}

void write_trace_csv(std::ostream& out, const MergeTrace& trace) {
    out << "step,left_id,right_id,linkage_value\n";
    const auto old_precision = out.precision(17);
    for (std::size_t s = 0; s < trace.size(); ++s) {
        out << s << ',' << trace[s].left_id << ',' << trace[s].right_id << ',' << trace[s].linkage << '\n';
    }
    out.precision(old_precision);
}

}  // namespace ohc
