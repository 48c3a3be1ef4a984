#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ohc/cli.hpp"
#include "ohc/data_io.hpp"
#include "ohc/objectives.hpp"
#include "oracles.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ohc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp() {
    static const fs::path dir = [] {
        const char* env = std::getenv("OHC_TMP");
        fs::path d = env ? fs::path(env) : fs::temp_directory_path() / "ohc_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path(const std::string& name) { return (tmp() / name).string(); }

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

nlohmann::json first_json(const std::string& text) { return nlohmann::json::parse(text.substr(0, text.find('\n'))); }

std::vector<std::vector<std::string>> csv_rows(const std::string& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

void write_points(const std::string& p, const oracle::Points& pts) { save_csv(p, oracle::dataset_of(pts)); }

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"gen"}).code == 2);
    CHECK(run({"fit", "--algo", "perch", "--input", "x", "--out", "y"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    const auto bench_help = run({"bench", "--help"});
    CHECK(bench_help.code == 0);
    CHECK(bench_help.out.find("triplet_vs_hac") != std::string::npos);
}

TEST_CASE("gen") {
    const auto a = run({"gen", "--clusters", "3", "--dim", "2", "--n", "60", "--seed", "4", "--out", path("g1.csv"),
                        "--labels", path("g1.labels")});
    REQUIRE(a.code == 0);
    run({"gen", "--clusters", "3", "--dim", "2", "--n", "60", "--seed", "4", "--out", path("g2.csv")});
    CHECK(slurp(path("g1.csv")) == slurp(path("g2.csv")));
    const auto d = load_csv(path("g1.csv"));
    CHECK(d.data.size() == 60);
    CHECK(d.data.dim() == 2);
    std::istringstream labels(slurp(path("g1.labels")));
    int count = 0;
    for (int l; labels >> l; ++count) CHECK((l >= 0 && l < 3));
    CHECK(count == 60);

    CHECK(run({"gen", "--clusters", "0", "--out", path("bad.csv")}).code == 1);
    CHECK(run({"gen", "--n", "ten", "--out", path("bad.csv")}).code == 2);
}

TEST_CASE("fit every algorithm") {
    run({"gen", "--clusters", "3", "--n", "40", "--seed", "2", "--out", path("f.csv")});
    for (const std::string algo : {"hac", "otd", "ohac", "naive1", "naive2", "random"}) {
        CAPTURE(algo);
        const auto tree = path("f_" + algo + ".json");
        const auto trace = path("f_" + algo + ".trace.csv");
        const auto r = run({"fit", "--algo", algo, "--input", path("f.csv"), "--out", tree, "--trace", trace});
        REQUIRE(r.code == 0);
        const Hierarchy h = load_tree(tree);
        h.validate();
        CHECK(h.size() == 40);
        const auto rows = csv_rows(trace);
        if (algo == "hac") {
            CHECK(rows[0] == std::vector<std::string>{"step", "left_id", "right_id", "linkage_value"});
            CHECK(rows.size() == 40);
        } else if (algo != "random") {
            CHECK(rows[0] == std::vector<std::string>{"k", "algorithm", "round_seconds", "height", "beta_observed"});
            CHECK(rows.size() == 41);
            CHECK(rows[40][0] == "40");
            CHECK(rows[40][1] == algo);
        }
    }
    const auto otd = run({"fit", "--algo", "otd", "--input", path("f.csv"), "--out", path("o.json")});
    CHECK(otd.out.find("beta_observed") != std::string::npos);
    CHECK(run({"fit", "--algo", "hac", "--input", path("missing.csv"), "--out", path("o.json")}).code == 1);
    CHECK(run({"fit", "--algo", "hac", "--input", path("f.csv"), "--out", path("o.json"), "--shift", "x"}).code == 2);
}

TEST_CASE("shuffled streams keep file row indices") {
    std::mt19937_64 rng(3);
    write_points(path("s.csv"), oracle::random_points(rng, 30, 2, 0, 1));
    REQUIRE(run({"fit", "--algo", "hac", "--input", path("s.csv"), "--out", path("s_hac.json")}).code == 0);
    REQUIRE(run({"fit", "--algo", "naive1", "--input", path("s.csv"), "--out", path("s_n1.json"), "--shuffle-seed",
                 "8"})
                .code == 0);
    // Agglomeration ignores the input order, so the trees agree leaf for leaf.
    const auto r = run({"eval", "--tree", path("s_n1.json"), "--against", path("s_hac.json"), "--metric", "triplet"});
    REQUIRE(r.code == 0);
    CHECK(first_json(r.out)["distance"] == 0.0);
}

TEST_CASE("naive1 and hac agree") {
    run({"gen", "--clusters", "4", "--n", "80", "--seed", "6", "--out", path("n.csv")});
    run({"fit", "--algo", "naive1", "--input", path("n.csv"), "--out", path("n1.json")});
    run({"fit", "--algo", "hac", "--input", path("n.csv"), "--out", path("nh.json")});
    const auto r = run({"eval", "--tree", path("n1.json"), "--against", path("nh.json"), "--metric", "triplet"});
    REQUIRE(r.code == 0);
    const auto j = first_json(r.out);
    CHECK(j["distance"] == 0.0);
    CHECK(j["n"] == 80);
}

TEST_CASE("otd on a separated mixture") {
    // The gmm-8 analogue used by the acceptance suite.
    REQUIRE(run({"gen", "--clusters", "8", "--dim", "3", "--n", "800", "--separation", "100", "--seed", "1", "--out",
                 path("m.csv")})
                .code == 0);
    for (const std::string sim : {"dot-product", "shifted-negative-sq-euclidean"}) {
        CAPTURE(sim);
        REQUIRE(run({"fit", "--algo", "otd", "--similarity", sim, "--input", path("m.csv"), "--out",
                     path("m_otd.json")})
                    .code == 0);
        const auto r = run({"eval", "--tree", path("m_otd.json"), "--data", path("m.csv"), "--similarity", sim});
        REQUIRE(r.code == 0);
        const auto j = first_json(r.out);
        REQUIRE(!j["fraction_of_max"].is_null());
        CHECK(j["fraction_of_max"].get<double>() >= 0.33);
    }
}

TEST_CASE("bench on the mixture") {
    const auto dir = path("bench_gmm");
    REQUIRE(run({"bench", "--dataset", "gmm8", "--sizes", "800", "--algos", "ohac,hac", "--seed", "1", "--out-dir",
                 dir})
                .code == 0);
    const auto rows = csv_rows(dir + "/bench.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][1] == "hac");
    CHECK(rows[2][1] == "ohac");
    CHECK(std::abs(std::stod(rows[1][7]) - std::stod(rows[2][7])) <= 0.02);
    CHECK(std::stod(rows[2][8]) <= 0.05);
}

TEST_CASE("eval") {
    // w_ab = 2, w_ac = w_bc = 1 under the dot product.
    write_points(path("e.csv"), {{1, 1}, {1, 1}, {1, 0}});
    Hierarchy h;
    h.attach_sibling(h.add_leaf(0), 1);
    h.attach_sibling(h.root(), 2);
    save_tree(h, path("e.json"));
    const auto r = run({"eval", "--tree", path("e.json"), "--data", path("e.csv"), "--similarity", "dot-product"});
    REQUIRE(r.code == 0);
    const auto j = first_json(r.out);
    CHECK(j["total"] == 2.0);
    CHECK(j["fraction_of_max"] == 0.5);
    CHECK(j["max_revenue"] == 4.0);
    CHECK(r.out.find("fraction of max 0.5") != std::string::npos);

    const auto c = run({"eval", "--tree", path("e.json"), "--data", path("e.csv"), "--similarity", "dot-product",
                        "--metric", "dasgupta-cost"});
    CHECK(first_json(c.out)["cost"] == 10.0);

    CHECK(run({"eval", "--tree", path("e.json"), "--metric", "triplet"}).code == 2);
    CHECK(run({"eval", "--tree", path("e.json")}).code == 2);
    CHECK(run({"eval", "--tree", path("e.json"), "--data", path("e.csv"), "--exact", "--samples", "10"}).code == 2);
    CHECK(run({"eval", "--tree", path("e.json"), "--data", path("e.csv"), "--metric", "dasgupta-cost", "--samples",
               "10"})
              .code == 2);
    CHECK(run({"eval", "--tree", path("e.json"), "--data", path("e.csv"), "--metric", "nope"}).code == 2);
}

TEST_CASE("exact and sampled eval agree") {
    std::mt19937_64 rng(17);
    write_points(path("x.csv"), oracle::random_points(rng, 150, 2, 0, 1));
    run({"fit", "--algo", "otd", "--input", path("x.csv"), "--out", path("x.json"), "--similarity", "dot-product"});
    const auto exact = first_json(
        run({"eval", "--tree", path("x.json"), "--data", path("x.csv"), "--similarity", "dot-product", "--exact"}).out);
    const auto est = first_json(run({"eval", "--tree", path("x.json"), "--data", path("x.csv"), "--similarity",
                                     "dot-product", "--samples", "100000", "--seed", "3"})
                                    .out);
    CHECK(est["method"]["samples"] == 100000);
    const double se = est["standard_error"].get<double>();
    CHECK(se > 0.0);
    CHECK(std::abs(est["total"].get<double>() - exact["total"].get<double>()) <= 3.0 * se);
}

TEST_CASE("bench") {
    const auto dir = path("bench");
    const auto r = run({"bench", "--sizes", "60,120", "--algos", "otd,ohac,hac,random", "--repeats", "3", "--out-dir",
                        dir, "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(dir + "/bench.csv");
    REQUIRE(rows.size() == 1 + 2 * 3 * 4);
    CHECK(rows[0] == std::vector<std::string>{"dataset", "algorithm", "linkage", "n", "repeat", "seed",
                                              "revenue_per_pair", "fraction_of_max", "triplet_vs_hac",
                                              "total_seconds", "rounds_file"});
    CHECK(rows[1][1] == "hac");
    CHECK(rows[1][8] == "0");
    // Repeats rerun the same data, so everything but the timing repeats.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& first = rows[1 + ((i - 1) / 12) * 12 + (i - 1) % 4];
        for (std::size_t c : {0, 1, 2, 3, 5, 6, 7, 8, 10}) CHECK(rows[i][c] == first[c]);
        CHECK(!rows[i][7].empty());
        CHECK(!rows[i][8].empty());
    }
    const auto rounds = csv_rows(dir + "/rounds.csv");
    CHECK(rounds[0] == std::vector<std::string>{"dataset", "algorithm", "n", "repeat", "k", "round_seconds", "height"});
    // otd and ohac: 60 + 120 rounds each, three repeats.
    CHECK(rounds.size() == 1 + 3 * 2 * 180);

    const auto capped = run({"bench", "--sizes", "70K", "--out-dir", dir});
    CHECK(capped.code == 2);
    CHECK(capped.err.find("memory") != std::string::npos);
    CHECK(run({"bench", "--sizes", "abc", "--out-dir", dir}).code == 2);
    CHECK(run({"bench", "--algos", "perch", "--out-dir", dir}).code == 2);
}

TEST_CASE("separation") {
    // Tight groups on orthogonal axes.
    oracle::Points sep;
    std::mt19937_64 rng(19);
    std::normal_distribution<double> jitter(0.0, 0.01);
    for (int i = 0; i < 90; ++i) {
        std::vector<double> p(3, 0.0);
        p[i % 3] = 10.0 + jitter(rng);
        sep.push_back(p);
    }
    write_points(path("sep.csv"), sep);
    const auto a = run({"separation", "--input", path("sep.csv"), "--similarity", "dot-product"});
    CHECK(a.code == 0);
    const auto ja = first_json(a.out);
    CHECK(ja["beta_observed"].get<double>() >= 0.9);
    CHECK(ja["holds"] == true);

    write_points(path("noise.csv"), oracle::random_points(rng, 100, 2, 0, 1));
    const auto b = run({"separation", "--input", path("noise.csv"), "--similarity", "dot-product"});
    CHECK(b.code == 0);
    CHECK(first_json(b.out)["holds"] == true);

    const auto neg = run({"separation", "--input", path("noise.csv"), "--similarity", "negative-sq-euclidean"});
    CHECK(neg.code == 0);
    CHECK(first_json(neg.out)["holds"].is_null());
    CHECK(neg.out.find("does not apply") != std::string::npos);

    write_points(path("two.csv"), {{1, 0}, {0, 1}});
    const auto c = run({"separation", "--input", path("two.csv")});
    CHECK(c.code == 0);
    CHECK(c.out.find("vacuous") != std::string::npos);
}
