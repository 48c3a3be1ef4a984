#include "ohc/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace ohc {

LabeledDataset generate_gmm(const GmmSpec& spec) {
    if (spec.clusters < 1) throw std::invalid_argument("gmm needs at least one cluster");
    if (spec.n < spec.clusters) throw std::invalid_argument("gmm needs at least one point per cluster");
    if (spec.dim < 1) throw std::invalid_argument("gmm dimension must be positive");
    if (!(spec.spread > 0.0)) throw std::invalid_argument("gmm spread must be positive");
    if (!(spec.separation >= 0.0)) throw std::invalid_argument("gmm separation must be nonnegative");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> place(0.0, spec.separation);
    std::vector<double> centers(spec.clusters * spec.dim);
    for (double& c : centers) c = place(rng);

    std::normal_distribution<double> noise(0.0, spec.spread);
    LabeledDataset out{Dataset(spec.dim), {}};
    std::vector<double> x(spec.dim);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t c = i % spec.clusters;
        for (std::size_t k = 0; k < spec.dim; ++k) x[k] = centers[c * spec.dim + k] + noise(rng);
        out.data.append(x);
        out.labels.push_back(static_cast<int>(c));
    }
    return shuffled(out, rng());
}

Dataset generate_uniform(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> values(n * dim);
    for (double& v : values) v = unit(rng);
    return Dataset(dim, std::move(values));
}

LabeledDataset shuffled(const LabeledDataset& in, std::uint64_t seed) {
    std::vector<std::size_t> order(in.data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    LabeledDataset out{Dataset(in.data.dim()), {}};
    for (std::size_t i : order) {
        out.data.append(in.data.point(i));
        if (!in.labels.empty()) out.labels.push_back(in.labels[i]);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    cell = trim(cell);
    T value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": '" +
                         std::string(cell) + "' is not a number");
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LabeledDataset read_csv(std::istream& in, bool has_labels) {
    LabeledDataset out;
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t row = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (width == 0) {
            width = cells.size();
            if (has_labels && width < 2) throw ParseError("row " + std::to_string(row) + ": no coordinates before the label");
        } else if (cells.size() != width) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(width) + " columns, found " +
                             std::to_string(cells.size()));
        }
        const std::size_t coords = has_labels ? width - 1 : width;
        for (std::size_t c = 0; c < coords; ++c) values.push_back(parse_cell<double>(cells[c], row, c + 1));
        if (has_labels) out.labels.push_back(parse_cell<int>(cells.back(), row, width));
    }
    if (width == 0) throw ParseError("no data rows");
    out.data = Dataset(has_labels ? width - 1 : width, std::move(values));
    return out;
}

LabeledDataset load_csv(const std::filesystem::path& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_csv(in, has_labels);
}

void write_csv(std::ostream& out, const Dataset& data, const std::vector<int>& labels) {
    if (!labels.empty() && labels.size() != data.size()) throw std::invalid_argument("one label per point expected");
    for (PointIndex i = 0; i < data.size(); ++i) {
        const auto x = data.point(i);
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (k) out << ',';
            out << format_double(x[k]);
        }
        if (!labels.empty()) out << ',' << labels[i];
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& data, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, data, labels);
}

std::string tree_to_json(const Hierarchy& h) {
    nlohmann::json nodes = nlohmann::json::array();
    nlohmann::json doc{{"n", h.size()}};
    if (h.empty()) {
        doc["nodes"] = nodes;
        doc["root"] = nullptr;
        return doc.dump();
    }
    std::unordered_map<NodeId, std::size_t> dense;
    auto emit_leaf = [&](NodeId id) {
        dense[id] = nodes.size();
        nodes.push_back({{"id", nodes.size()}, {"leaf_index", h.node(id).leaf_index}});
    };
    // Post-order over every node, leaves included.
    std::vector<std::pair<NodeId, bool>> stack{{h.root(), false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (h.is_leaf(id)) {
            emit_leaf(id);
        } else if (expanded) {
            dense[id] = nodes.size();
            nodes.push_back({{"id", nodes.size()}, {"left", dense.at(h.left(id))}, {"right", dense.at(h.right(id))}});
        } else {
            stack.emplace_back(id, true);
            stack.emplace_back(h.right(id), false);
            stack.emplace_back(h.left(id), false);
        }
    }
    doc["nodes"] = std::move(nodes);
    doc["root"] = dense.at(h.root());
    return doc.dump();
}

Hierarchy tree_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tree document is not valid JSON: ") + e.what());
    }
    auto fail = [](const std::string& what) -> void { throw ParseError("invalid tree document: " + what); };
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("nodes") || !doc.contains("root")) {
        fail("expected keys n, nodes, root");
    }
    if (!doc["n"].is_number_unsigned()) fail("n must be a nonnegative integer");
    if (!doc["nodes"].is_array()) fail("nodes must be an array");
    const std::size_t n = doc["n"].get<std::size_t>();
    Hierarchy h;
    if (doc["root"].is_null()) {
        if (n != 0 || !doc["nodes"].empty()) fail("null root with nonempty tree");
        return h;
    }
    if (!doc["root"].is_number_unsigned()) fail("root must be a node id");

    struct Raw {
        bool leaf = false;
        std::size_t left = 0;
        std::size_t right = 0;
        std::size_t leaf_index = 0;
    };
    std::unordered_map<std::size_t, Raw> raw;
    for (const auto& node : doc["nodes"]) {
        if (!node.is_object() || !node.contains("id") || !node["id"].is_number_unsigned()) fail("node without an id");
        const auto id = node["id"].get<std::size_t>();
        Raw r;
        if (node.contains("leaf_index")) {
            if (node.contains("left") || node.contains("right")) fail("node " + std::to_string(id) + " is both leaf and internal");
            if (!node["leaf_index"].is_number_unsigned()) fail("bad leaf_index on node " + std::to_string(id));
            r.leaf = true;
            r.leaf_index = node["leaf_index"].get<std::size_t>();
            if (r.leaf_index >= n) fail("leaf_index " + std::to_string(r.leaf_index) + " out of range");
        } else {
            if (!node.contains("left") || !node.contains("right") || !node["left"].is_number_unsigned() ||
                !node["right"].is_number_unsigned()) {
                fail("internal node " + std::to_string(id) + " needs left and right");
            }
            r.left = node["left"].get<std::size_t>();
            r.right = node["right"].get<std::size_t>();
        }
        if (!raw.emplace(id, r).second) fail("duplicate node id " + std::to_string(id));
    }
    const auto root = doc["root"].get<std::size_t>();
    if (!raw.contains(root)) fail("root " + std::to_string(root) + " is not a node");

    // Post-order rebuild; `seen` rejects shared children and cycles.
    std::unordered_set<std::size_t> seen{root};
    std::unordered_map<std::size_t, NodeId> built;
    std::vector<std::pair<std::size_t, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        const Raw& r = raw.at(id);
        if (r.leaf) {
            if (h.contains(r.leaf_index)) fail("leaf_index " + std::to_string(r.leaf_index) + " appears twice");
            built[id] = h.add_leaf(r.leaf_index);
        } else if (expanded) {
            built[id] = h.join(built.at(r.left), built.at(r.right));
        } else {
            for (std::size_t c : {r.left, r.right}) {
                if (!raw.contains(c)) fail("node " + std::to_string(id) + " references missing node " + std::to_string(c));
                if (!seen.insert(c).second) fail("node " + std::to_string(c) + " has more than one parent or a cycle");
            }
            stack.emplace_back(id, true);
            stack.emplace_back(r.right, false);
            stack.emplace_back(r.left, false);
        }
    }
    if (seen.size() != raw.size()) fail("nodes unreachable from the root");
    h.set_root(built.at(root));
    if (h.size() != n) fail("n = " + std::to_string(n) + " but the tree has " + std::to_string(h.size()) + " leaves");
    return h;
}

void save_tree(const Hierarchy& h, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << tree_to_json(h) << '\n';
}

Hierarchy load_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return tree_from_json(buf.str());
}

std::string to_newick(const Hierarchy& h) {
    if (h.empty()) return ";";
    std::string out;
    std::vector<std::pair<NodeId, int>> stack{{h.root(), 0}};
    while (!stack.empty()) {
        auto& [id, stage] = stack.back();
        if (h.is_leaf(id)) {
            out += std::to_string(h.node(id).leaf_index);
            stack.pop_back();
            continue;
        }
        if (stage == 0) {
            out += '(';
            stage = 1;
            stack.emplace_back(h.left(id), 0);
        } else if (stage == 1) {
            out += ',';
            stage = 2;
            stack.emplace_back(h.right(id), 0);
        } else {
            out += ')';
            stack.pop_back();
        }
    }
    return out + ";";
}

}  // namespace ohc
