#include "fixtures.hpp"

#include <crystgraph/stats.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace crystgraph;
using Catch::Approx;

namespace {

const ReductionEntry &entry(const ReductionReport &r, const std::string &id) {
    const auto it = std::find_if(r.entries.begin(), r.entries.end(),
                                 [&](const ReductionEntry &e) { return e.id == id; });
    REQUIRE(it != r.entries.end());
    return *it;
}

PipelineConfig knn12() {
    PipelineConfig pc;
    pc.k = 12;
    return pc;
}

} // namespace

TEST_CASE("histogram counts every value once") {
    Histogram h(0.0, 0.5, 4);
    for (double v : {-1.0, 0.0, 0.49, 0.5, 1.99, 2.0, 7.0})
        h.add(v);
    CHECK(h.counts == std::vector<size_t>{2, 1, 0, 1});
    CHECK(h.underflow == 1);
    CHECK(h.overflow == 2);
    CHECK(h.total() == 7);
    CHECK(h.bin_edges() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    const auto j = histogram_to_json(h);
    CHECK(j["counts"].size() == 4);
    CHECK(j["edges"].size() == 5);
}

TEST_CASE("knn sweep on simple cubic follows the shell oracle") {
    const std::vector<CifStructure> corpus{{fixtures::simple_cubic(3.0), {}}};
    std::vector<SweepPoint> grid;
    for (int k = 1; k <= 32; ++k)
        grid.push_back({EdgeMethod::knn, static_cast<double>(k)});
    grid.push_back({EdgeMethod::radius, 2.9});
    grid.push_back({EdgeMethod::radius, 3.0});
    grid.push_back({EdgeMethod::voronoi, 0.0});
    const auto rows = sweep_connectivity(corpus, grid);
    REQUIRE(rows.size() == grid.size());
    for (int k = 1; k <= 32; ++k) {
        const auto expected = fixtures::brute_knn(corpus[0].structure, k, 1e-9).size();
        CHECK(rows[static_cast<size_t>(k - 1)].mean_degree == Approx(static_cast<double>(expected)));
    }
    CHECK(rows[0].mean_degree == 6.0);
    CHECK(rows[6].mean_degree == 18.0);
    CHECK(rows[32].mean_degree == 0.0);
    CHECK(rows[33].mean_degree == 6.0);
    CHECK(rows[34].mean_degree == 6.0);
    for (const auto &r : rows) {
        CHECK(r.structures == 1);
        CHECK(r.failures == 0);
    }
}

TEST_CASE("sweep matches direct edge counts on the corpus") {
    const auto corpus = fixtures::load_corpus();
    const std::vector<SweepPoint> grid{{EdgeMethod::knn, 6}, {EdgeMethod::radius, 3.5},
                                       {EdgeMethod::voronoi, 0}};
    const auto rows = sweep_connectivity(corpus, grid, 4);
    REQUIRE(rows.size() == 3);
    for (size_t g = 0; g < grid.size(); ++g) {
        PipelineConfig pc;
        pc.method = grid[g].method;
        pc.k = 6;
        pc.r = 3.5;
        double sum = 0.0;
        for (const auto &c : corpus)
            sum += static_cast<double>(build_edges(c.structure, pc).size()) /
                   static_cast<double>(c.structure.size());
        CHECK(rows[g].structures == corpus.size());
        CHECK(rows[g].mean_degree == Approx(sum / static_cast<double>(corpus.size())));
        CHECK(rows[g].min_degree <= rows[g].mean_degree);
        CHECK(rows[g].max_degree >= rows[g].mean_degree);
    }
    CHECK(sweep_to_csv(rows) == sweep_to_csv(sweep_connectivity(corpus, grid, 1)));
    CHECK(sweep_to_csv(rows).starts_with("method,"));
    CHECK(sweep_to_json(rows).size() == 3);
}

TEST_CASE("corpus stats") {
    std::vector<GraphBundle> graphs;
    for (const auto &c : fixtures::load_corpus()) {
        auto pc = knn12();
        pc.line_graph = LineGraphVariant::destination;
        graphs.push_back(build_graph(c, pc));
    }
    const auto stats = corpus_stats(graphs);
    CHECK(stats.graphs.size() == graphs.size());
    CHECK(stats.degree.total() == graphs.size());
    CHECK(stats.node_count.total() == graphs.size());
    size_t edges = 0;
    for (const auto &g : graphs)
        edges += g.graph.num_edges();
    CHECK(stats.distance.total() == edges);
    CHECK(stats.mean_edges == Approx(static_cast<double>(edges) / static_cast<double>(graphs.size())));
    for (const auto &s : stats.graphs) {
        REQUIRE(s.n_lg_edges);
        CHECK(s.avg_degree >= 12.0);
    }
    CHECK(corpus_stats_to_json(stats).dump() == corpus_stats_to_json(corpus_stats(graphs)).dump());
}

TEST_CASE("reduction report") {
    const auto corpus = fixtures::load_corpus();
    const auto report = asu_reduction_report(corpus, knn12(), 4);
    CHECK(report.failures.empty());
    CHECK(report.entries.size() == corpus.size());
    CHECK(report.factors_in_bounds());
    const auto &nacl = entry(report, "NaCl_rocksalt");
    CHECK(nacl.node_factor == 4.0);
    CHECK(nacl.n_unit == 8);
    CHECK(nacl.n_asu == 2);
    CHECK(entry(report, "NaCl_primitive").node_factor == 1.0);
    CHECK(report.node_factor_hist.total() == report.entries.size());
    for (const auto &e : report.entries) {
        CHECK(e.n_asu <= e.n_unit);
        CHECK(e.m_asu <= e.m_unit);
        CHECK(e.node_factor == Approx(static_cast<double>(e.n_unit) / static_cast<double>(e.n_asu)));
    }
    CHECK(reduction_report_to_csv(report) ==
          reduction_report_to_csv(asu_reduction_report(corpus, knn12(), 1)));
    CHECK(reduction_report_to_json(report).contains("entries"));

    // Identity-only symmetry gives factor 1 everywhere.
    auto none = knn12();
    none.symmetry = SymmetrySource::none;
    const auto flat = asu_reduction_report(corpus, none, 4);
    for (const auto &e : flat.entries) {
        CHECK(e.node_factor == 1.0);
        CHECK(e.edge_factor == 1.0);
    }
}
