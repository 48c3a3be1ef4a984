#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ohc/linkage.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace ohc;

namespace {

bool close(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

ClusterMoments moments_of(const oracle::Points& pts) {
    ClusterMoments m(pts.front().size());
    for (const auto& p : pts) m.add_point(p);
    return m;
}

std::vector<std::size_t> iota_n(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

// Two-cluster brute-force linkage over explicit point lists.
double brute(LinkageKind kind, const oracle::Points& a, const oracle::Points& b) {
    oracle::Points all = a;
    all.insert(all.end(), b.begin(), b.end());
    std::vector<std::size_t> ia = iota_n(a.size());
    std::vector<std::size_t> ib;
    for (std::size_t i = 0; i < b.size(); ++i) ib.push_back(a.size() + i);
    return oracle::linkage(all, kind, ia, ib);
}

}  // namespace

TEST_CASE("names and orientations") {
    for (auto k : {LinkageKind::CentroidDot, LinkageKind::AverageDot, LinkageKind::AverageL2Sq,
                   LinkageKind::CentroidL2Sq}) {
        CHECK(parse_linkage_kind(to_string(k)) == k);
    }
    CHECK(default_orientation(LinkageKind::AverageDot) == Orientation::Maximize);
    CHECK(default_orientation(LinkageKind::CentroidDot) == Orientation::Maximize);
    CHECK(default_orientation(LinkageKind::AverageL2Sq) == Orientation::Minimize);
    CHECK(default_orientation(LinkageKind::CentroidL2Sq) == Orientation::Minimize);
    CHECK(parse_orientation("maximize") == Orientation::Maximize);
    CHECK_THROWS_AS(parse_linkage_kind("ward"), std::invalid_argument);
    CHECK_THROWS_AS(parse_orientation("up"), std::invalid_argument);
    CHECK(LinkageSpec::of(LinkageKind::AverageDot).merge_key(3.0) == -3.0);
    CHECK(LinkageSpec::of(LinkageKind::AverageL2Sq).merge_key(3.0) == 3.0);
    CHECK(matching_similarity(LinkageKind::AverageDot).kind == SimilarityKind::DotProduct);
}

TEST_CASE("hand examples") {
    const auto l2 = LinkageSpec::of(LinkageKind::AverageL2Sq);
    CHECK(linkage_value(l2, moments_of({{0, 0}}), moments_of({{3, 4}})) == 25.0);
    CHECK(linkage_value(l2, moments_of({{0, 0}, {2, 0}}), moments_of({{1, 1}})) == 2.0);
    CHECK(linkage_value(LinkageSpec::of(LinkageKind::CentroidL2Sq), moments_of({{0, 0}, {2, 0}}),
                        moments_of({{1, 1}})) == 1.0);
    CHECK(linkage_value(LinkageSpec::of(LinkageKind::CentroidDot), moments_of({{2, 0}, {0, 2}}),
                        moments_of({{1, 3}})) == 4.0);
    CHECK_THROWS_AS(linkage_value(l2, ClusterMoments(2), moments_of({{1, 1}})), std::invalid_argument);
}

TEST_CASE("moment formulas against brute force") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> size(1, 200);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = oracle::random_points(rng, size(rng), 4, -10, 10);
        const auto b = oracle::random_points(rng, size(rng), 4, -10, 10);
        const auto ma = moments_of(a);
        const auto mb = moments_of(b);
        for (auto k : {LinkageKind::CentroidDot, LinkageKind::AverageDot, LinkageKind::AverageL2Sq,
                       LinkageKind::CentroidL2Sq}) {
            const auto spec = LinkageSpec::of(k);
            const double v = linkage_value(spec, ma, mb);
            CHECK(close(v, brute(k, a, b)));
            CHECK(v == linkage_value(spec, mb, ma));
        }
        CHECK(close(linkage_value(LinkageSpec::of(LinkageKind::AverageDot), ma, mb),
                    linkage_value(LinkageSpec::of(LinkageKind::CentroidDot), ma, mb)));
    }
}

TEST_CASE("pairwise matrix") {
    std::mt19937_64 rng(43);
    const auto spec = LinkageSpec::of(LinkageKind::AverageL2Sq);
    SUBCASE("two and three clusters") {
        const auto a = moments_of({{0, 0}});
        const auto b = moments_of({{3, 4}});
        const auto c = moments_of({{1, 1}, {2, 2}});
        const std::vector<MomentsView> two{a, b};
        const auto m2 = pairwise_linkages(spec, two);
        CHECK(m2.size() == 1);
        CHECK(m2(0, 1) == linkage_value(spec, a, b));
        const std::vector<MomentsView> three{a, b, c};
        const auto m3 = pairwise_linkages(spec, three);
        CHECK(m3.size() == 3);
        CHECK(m3(0, 2) == linkage_value(spec, a, c));
        CHECK(m3(2, 1) == linkage_value(spec, b, c));
        const std::vector<MomentsView> one{a};
        CHECK_THROWS_AS(pairwise_linkages(spec, one), std::invalid_argument);
    }
    SUBCASE("ten random clusters") {
        std::vector<oracle::Points> raw;
        std::vector<ClusterMoments> ms;
        for (int i = 0; i < 10; ++i) {
            raw.push_back(oracle::random_points(rng, 1 + rng() % 15, 3, -1, 1));
            ms.push_back(moments_of(raw.back()));
        }
        const std::vector<MomentsView> views(ms.begin(), ms.end());
        const auto m = pairwise_linkages(spec, views);
        CHECK(m.order() == 10);
        CHECK(m.size() == 45);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = i + 1; j < 10; ++j)
                CHECK(close(m(i, j), brute(LinkageKind::AverageL2Sq, raw[i], raw[j])));
    }
}
