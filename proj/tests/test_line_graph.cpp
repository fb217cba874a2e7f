#include "fixtures.hpp"

#include <crystgraph/error.hpp>
#include <crystgraph/graph.hpp>
#include <crystgraph/line_graph.hpp>
#include <crystgraph/symmetry.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>
#include <set>

using namespace crystgraph;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicEdge edge(int src, int dst, const Vec3 &v) {
    PeriodicEdge e;
    e.src = src;
    e.dst = dst;
    e.vector = v;
    e.distance = v.norm();
    return e;
}

CrystalGraph abstract_graph(int nodes, std::vector<PeriodicEdge> edges) {
    CrystalGraph g;
    g.id = "g";
    g.nodes.assign(static_cast<size_t>(nodes), GraphNode{1, 1, {}});
    g.edges = std::move(edges);
    return g;
}

// Random multigraph with random vectors; about a third of the edges get an
// exact reverse partner so backtrack pairs occur.
CrystalGraph random_graph(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = static_cast<int>(rng() % 25);
    std::vector<PeriodicEdge> edges;
    for (int i = 0; i < m; ++i) {
        const int s = static_cast<int>(rng() % n), d = static_cast<int>(rng() % n);
        const Vec3 v(u(rng) + 2.0, u(rng), u(rng));
        edges.push_back(edge(s, d, v));
        if (rng() % 3 == 0)
            edges.push_back(edge(d, s, -v));
    }
    return abstract_graph(n, edges);
}

// Pair scanner straight from the definition.
std::multiset<std::pair<int, int>> scan_pairs(const CrystalGraph &g, LineGraphVariant variant,
                                              bool keep_backtrack) {
    std::multiset<std::pair<int, int>> out;
    const int m = static_cast<int>(g.num_edges());
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            const auto &a = g.edges[static_cast<size_t>(p)];
            const auto &b = g.edges[static_cast<size_t>(q)];
            if (variant == LineGraphVariant::destination) {
                if (p != q && a.dst == b.dst)
                    out.insert({p, q});
            } else if (a.dst == b.src) {
                const bool back = a.src == b.dst && (a.vector + b.vector).norm() < 1e-12;
                if (keep_backtrack || !back)
                    out.insert({p, q});
            }
        }
    return out;
}

std::multiset<std::pair<int, int>> pairs_of(const LineGraph &lg) {
    std::multiset<std::pair<int, int>> out;
    for (const auto &e : lg.edges)
        out.insert({e.a, e.b});
    return out;
}

} // namespace

TEST_CASE("angle_between examples") {
    const Vec3 v(1.0, 2.0, -0.5);
    CHECK(angle_between(v, v) == Approx(0.0).margin(1e-7));
    CHECK(angle_between(v, -v) == Approx(kPi));
    CHECK(angle_between(Vec3(1, 0, 0), Vec3(1, 1, 0)) == Approx(kPi / 4));
    CHECK_THROWS_AS(angle_between(Vec3::Zero(), v), Error);
}

TEST_CASE("line graph examples") {
    // chain a -> b -> c
    const auto chain = abstract_graph(3, {edge(0, 1, Vec3(1, 0, 0)), edge(1, 2, Vec3(0, 1, 0))});
    const auto path = line_graph(chain, LineGraphVariant::path);
    REQUIRE(path.num_edges() == 1);
    CHECK(path.edges[0].a == 0);
    CHECK(path.edges[0].b == 1);
    CHECK(path.num_nodes == 2);

    // three incoming edges at one node
    const auto star = abstract_graph(
        4, {edge(1, 0, Vec3(1, 0, 0)), edge(2, 0, Vec3(0, 1, 0)), edge(3, 0, Vec3(0, 0, 1))});
    const auto dest = line_graph(star, LineGraphVariant::destination);
    CHECK(dest.num_edges() == 6);
    for (double a : dest.angles)
        CHECK(a == Approx(kPi / 2));

    auto zero = star;
    zero.edges[0].vector.setZero();
    CHECK_THROWS_AS(line_graph(zero, LineGraphVariant::path), Error);

    CHECK(line_graph_variant_from_string("path") == LineGraphVariant::path);
    CHECK_THROWS_AS(line_graph_variant_from_string("tree"), Error);
}

TEST_CASE("second order line graph examples") {
    const auto chain = abstract_graph(4, {edge(0, 1, Vec3(1, 0, 0)), edge(1, 2, Vec3(0, 1, 0)),
                                          edge(2, 3, Vec3(0, 0, 1))});
    const auto l1 = line_graph(chain, LineGraphVariant::path);
    CHECK(l1.num_edges() == 2);
    const auto l2 = line_graph_order2(l1);
    CHECK(l2.order == 2);
    CHECK(l2.num_nodes == 2);
    CHECK(l2.num_edges() == 1);
    CHECK(l2.angles.empty());

    const auto lone = abstract_graph(2, {edge(0, 1, Vec3(1, 0, 0))});
    const auto l1e = line_graph(lone, LineGraphVariant::path);
    CHECK(l1e.num_edges() == 0);
    CHECK(line_graph_order2(l1e).num_edges() == 0);

    std::vector<PeriodicEdge> spokes;
    for (int i = 1; i <= 3; ++i)
        spokes.push_back(edge(i, 0, Vec3(i, 1, 0)));
    const auto star = line_graph(abstract_graph(4, spokes), LineGraphVariant::destination);
    CHECK(star.num_edges() == 6);
    CHECK(line_graph_order2(star).num_nodes == 6);
}

TEST_CASE("counts match the pair scanner on random graphs") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const auto g = random_graph(rng);
        const auto in = g.in_degree();
        const auto dest = line_graph(g, LineGraphVariant::destination);
        size_t expected = 0;
        for (int d : in)
            expected += static_cast<size_t>(d) * static_cast<size_t>(std::max(d - 1, 0));
        CHECK(dest.num_edges() == expected);
        CHECK(pairs_of(dest) == scan_pairs(g, LineGraphVariant::destination, false));
        for (bool keep : {false, true}) {
            const auto path = line_graph(g, LineGraphVariant::path, keep);
            CHECK(pairs_of(path) == scan_pairs(g, LineGraphVariant::path, keep));
            CHECK(path.num_nodes == g.num_edges());
        }
        CHECK(dest.num_nodes == g.num_edges());
        CHECK(dest.angles.size() == dest.num_edges());
        for (double a : dest.angles) {
            CHECK(a >= 0.0);
            CHECK(a <= kPi);
        }
        const auto l2 = line_graph_order2(dest);
        CHECK(l2.num_nodes == dest.num_edges());
        const auto l2p = line_graph_order2(line_graph(g, LineGraphVariant::path));
        CHECK(l2p.num_nodes == line_graph(g, LineGraphVariant::path).num_edges());
    }
}

TEST_CASE("path count identity with backtracks") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const auto g = random_graph(rng);
        const auto in = g.in_degree(), out = g.out_degree();
        size_t total = 0;
        for (size_t j = 0; j < in.size(); ++j)
            total += static_cast<size_t>(in[j]) * static_cast<size_t>(out[j]);
        const auto full = line_graph(g, LineGraphVariant::path, true);
        const auto trimmed = line_graph(g, LineGraphVariant::path, false);
        CHECK(full.num_edges() == total);
        CHECK(trimmed.num_edges() <= total);
    }
}

TEST_CASE("angles are rotation invariant") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const auto s = fixtures::random_structure(rng, 3);
        const auto r = rotate(s, fixtures::random_rotation(rng));
        for (auto variant : {LineGraphVariant::destination, LineGraphVariant::path}) {
            const auto a = line_graph(build_unit_graph(s, knn_edges(s, 8)), variant);
            const auto b = line_graph(build_unit_graph(r, knn_edges(r, 8)), variant);
            REQUIRE(a.num_edges() == b.num_edges());
            auto x = a.angles, y = b.angles;
            std::sort(x.begin(), x.end());
            std::sort(y.begin(), y.end());
            for (size_t k = 0; k < x.size(); ++k)
                CHECK(std::abs(x[k] - y[k]) <= 1e-9);
        }
    }
}

TEST_CASE("asu congruence of angle multisets") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 25; ++t) {
        const auto s = fixtures::random_symmetric(rng).structure;
        const auto edges = knn_edges(s, 10);
        const auto orbits = compute_orbits(s, find_symmetry_ops(s));
        const auto unit = build_unit_graph(s, edges);
        const auto asu = build_asu_graph(s, edges, orbits);
        for (auto variant : {LineGraphVariant::destination, LineGraphVariant::path}) {
            const auto lu = line_graph(unit, variant);
            const auto la = line_graph(asu, variant);
            // Per destination node of the base graph, angles of line-graph
            // edges ending at its incoming edges.
            const auto per_node = [](const CrystalGraph &g, const LineGraph &lg, int node) {
                std::vector<double> out;
                for (size_t k = 0; k < lg.num_edges(); ++k)
                    if (g.edges[static_cast<size_t>(lg.edges[k].b)].dst == node)
                        out.push_back(lg.angles[k]);
                std::sort(out.begin(), out.end());
                return out;
            };
            for (size_t i = 0; i < s.size(); ++i) {
                const int k = orbits.orbit_index(orbits.representative_of[i]);
                const auto a = per_node(unit, lu, static_cast<int>(i));
                const auto b = per_node(asu, la, k);
                REQUIRE(a.size() == b.size());
                for (size_t q = 0; q < a.size(); ++q)
                    CHECK(std::abs(a[q] - b[q]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("line graph JSON") {
    const auto star = abstract_graph(3, {edge(1, 0, Vec3(1, 0, 0)), edge(2, 0, Vec3(0, 1, 0))});
    const auto lg = line_graph(star, LineGraphVariant::destination);
    nlohmann::ordered_json rec = graph_to_json(star);
    add_line_graph_json(rec, lg);
    CHECK(rec.dump().find(R"("angles":[{"a":0,"b":1,"ang":1.5707963267948966})") != std::string::npos);
    const auto back = line_graph_from_json(nlohmann::json::parse(rec.dump()), 2);
    REQUIRE(back);
    CHECK(back->num_edges() == 2);
    CHECK(back->angles == lg.angles);
    CHECK(!line_graph_from_json(nlohmann::json::parse(graph_to_json(star).dump()), 2));
    CHECK_THROWS_AS(line_graph_from_json(nlohmann::json::parse(rec.dump()), 1), Error);
}
