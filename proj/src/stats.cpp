#include <crystgraph/error.hpp>
#include <crystgraph/stats.hpp>
#include <crystgraph/symmetry.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace crystgraph {

Histogram::Histogram(double lo_, double width_, size_t bins)
    : lo(lo_), width(width_), counts(bins, 0) {
    if (!(width_ > 0.0) || bins == 0)
        throw Error(ErrorKind::InvalidConfig, "histogram needs positive width and bins");
}

void Histogram::add(double value) {
    if (value < lo) {
        ++underflow;
        return;
    }
    const double pos = (value - lo) / width;
    if (pos >= static_cast<double>(counts.size())) {
        ++overflow;
        return;
    }
    ++counts[static_cast<size_t>(pos)];
}

size_t Histogram::total() const {
    size_t n = underflow + overflow;
    for (size_t c : counts)
        n += c;
    return n;
}

std::vector<double> Histogram::bin_edges() const {
    std::vector<double> edges(counts.size() + 1);
    for (size_t i = 0; i < edges.size(); ++i)
        edges[i] = lo + width * static_cast<double>(i);
    return edges;
}

nlohmann::ordered_json histogram_to_json(const Histogram &h) {
    nlohmann::ordered_json j;
    j["lo"] = h.lo;
    j["width"] = h.width;
    j["edges"] = h.bin_edges();
    j["counts"] = h.counts;
    j["underflow"] = h.underflow;
    j["overflow"] = h.overflow;
    return j;
}

GraphSummary summarize(const GraphBundle &bundle) {
    GraphSummary s;
    s.id = bundle.graph.id;
    s.n_nodes = bundle.graph.num_nodes();
    s.n_edges = bundle.graph.num_edges();
    s.avg_degree = s.n_nodes ? static_cast<double>(s.n_edges) / static_cast<double>(s.n_nodes) : 0.0;
    if (bundle.line_graph)
        s.n_lg_edges = bundle.line_graph->num_edges();
    return s;
}

CorpusStats corpus_stats(const std::vector<GraphBundle> &graphs) {
    CorpusStats stats;
    stats.degree = Histogram(0.0, kDegreeBinWidth, kDegreeBins);
    stats.node_count = Histogram(0.0, 1.0, kNodeCountBins);
    stats.distance = Histogram(0.0, kDistanceBinWidth,
                               static_cast<size_t>(std::lround(kDistanceMax / kDistanceBinWidth)));
    for (const auto &bundle : graphs) {
        const auto s = summarize(bundle);
        stats.degree.add(s.avg_degree);
        stats.node_count.add(static_cast<double>(s.n_nodes));
        for (const auto &e : bundle.graph.edges)
            stats.distance.add(e.distance);
        stats.mean_nodes += static_cast<double>(s.n_nodes);
        stats.mean_edges += static_cast<double>(s.n_edges);
        stats.mean_degree += s.avg_degree;
        stats.graphs.push_back(s);
    }
    if (!graphs.empty()) {
        const double n = static_cast<double>(graphs.size());
        stats.mean_nodes /= n;
        stats.mean_edges /= n;
        stats.mean_degree /= n;
    }
    return stats;
}

nlohmann::ordered_json corpus_stats_to_json(const CorpusStats &stats) {
    nlohmann::ordered_json j;
    j["structures"] = stats.graphs.size();
    j["mean_nodes"] = stats.mean_nodes;
    j["mean_edges"] = stats.mean_edges;
    j["mean_degree"] = stats.mean_degree;
    j["degree_histogram"] = histogram_to_json(stats.degree);
    j["node_count_histogram"] = histogram_to_json(stats.node_count);
    j["distance_histogram"] = histogram_to_json(stats.distance);
    auto graphs = nlohmann::ordered_json::array();
    for (const auto &g : stats.graphs) {
        nlohmann::ordered_json r;
        r["id"] = g.id;
        r["n_nodes"] = g.n_nodes;
        r["n_edges"] = g.n_edges;
        r["avg_degree"] = g.avg_degree;
        if (g.n_lg_edges)
            r["n_lg_edges"] = *g.n_lg_edges;
        graphs.push_back(std::move(r));
    }
    j["graphs"] = std::move(graphs);
    return j;
}

std::vector<SweepPoint> default_sweep_grid() {
    std::vector<SweepPoint> grid;
    for (int k = 1; k <= 32; ++k)
        grid.push_back({EdgeMethod::knn, static_cast<double>(k)});
    for (int i = 0; i <= 12; ++i)
        grid.push_back({EdgeMethod::radius, 2.0 + 0.5 * i});
    grid.push_back({EdgeMethod::voronoi, 0.0});
    return grid;
}

namespace {

PipelineConfig sweep_config(const SweepPoint &point) {
    PipelineConfig cfg;
    cfg.method = point.method;
    if (point.method == EdgeMethod::knn)
        cfg.k = static_cast<int>(std::lround(point.param));
    else if (point.method == EdgeMethod::radius)
        cfg.r = point.param;
    return cfg;
}

std::string format_param(const SweepPoint &p) {
    return p.method == EdgeMethod::voronoi ? std::string() : fmt::format("{}", p.param);
}

} // namespace

std::vector<SweepRow> sweep_connectivity(const std::vector<CifStructure> &corpus,
                                         const std::vector<SweepPoint> &grid, int jobs) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // degrees[p][s]: average degree of structure s at grid point p
    std::vector<std::vector<double>> degrees(grid.size(), std::vector<double>(corpus.size(), nan));
    parallel_for(corpus.size(), jobs, [&](size_t s) {
        const auto &structure = corpus[s].structure;
        for (size_t p = 0; p < grid.size(); ++p) {
            try {
                const auto edges = build_edges(structure, sweep_config(grid[p]));
                degrees[p][s] = static_cast<double>(edges.size()) / static_cast<double>(structure.size());
            } catch (const Error &) {
            }
        }
    });
    std::vector<SweepRow> rows;
    for (size_t p = 0; p < grid.size(); ++p) {
        SweepRow row;
        row.point = grid[p];
        std::vector<double> ok;
        for (double d : degrees[p]) {
            if (std::isnan(d))
                ++row.failures;
            else
                ok.push_back(d);
        }
        row.structures = ok.size();
        if (!ok.empty()) {
            double sum = 0.0;
            for (double d : ok)
                sum += d;
            row.mean_degree = sum / static_cast<double>(ok.size());
            double var = 0.0;
            for (double d : ok)
                var += (d - row.mean_degree) * (d - row.mean_degree);
            row.std_degree = std::sqrt(var / static_cast<double>(ok.size()));
            const auto [lo, hi] = std::minmax_element(ok.begin(), ok.end());
            row.min_degree = *lo;
            row.max_degree = *hi;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::string out = "method,param,structures,failures,mean_degree,std_degree,min_degree,max_degree\n";
    for (const auto &r : rows)
        out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(r.point.method),
                           format_param(r.point), r.structures, r.failures, r.mean_degree,
                           r.std_degree, r.min_degree, r.max_degree);
    return out;
}

nlohmann::ordered_json sweep_to_json(const std::vector<SweepRow> &rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &r : rows) {
        nlohmann::ordered_json j;
        j["method"] = std::string(to_string(r.point.method));
        if (r.point.method == EdgeMethod::voronoi)
            j["param"] = nullptr;
        else
            j["param"] = r.point.param;
        j["structures"] = r.structures;
        j["failures"] = r.failures;
        j["mean_degree"] = r.mean_degree;
        j["std_degree"] = r.std_degree;
        j["min_degree"] = r.min_degree;
        j["max_degree"] = r.max_degree;
        arr.push_back(std::move(j));
    }
    return arr;
}

bool ReductionReport::factors_in_bounds() const {
    for (const auto &e : entries)
        for (double f : {e.node_factor, e.edge_factor, e.lg_factor})
            if (!(f >= 1.0 && f <= 48.0))
                return false;
    return true;
}

namespace {

double ratio(size_t unit, size_t asu) {
    if (asu == 0)
        return unit == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(unit) / static_cast<double>(asu);
}

} // namespace

ReductionReport asu_reduction_report(const std::vector<CifStructure> &corpus,
                                     PipelineConfig config, int jobs) {
    if (!config.line_graph)
        config.line_graph = LineGraphVariant::destination;
    config.line_graph_order = 1;
    std::vector<std::optional<ReductionEntry>> slots(corpus.size());
    std::vector<std::optional<ExportFailure>> errors(corpus.size());
    parallel_for(corpus.size(), jobs, [&](size_t i) {
        const auto &input = corpus[i];
        try {
            PipelineConfig unit_cfg = config;
            unit_cfg.asu = false;
            PipelineConfig asu_cfg = config;
            asu_cfg.asu = true;
            const auto unit = build_graph(input, unit_cfg);
            const auto asu = build_graph(input, asu_cfg);
            ReductionEntry e;
            e.id = input.structure.provenance();
            e.num_ops = symmetry_ops_for(input, config).size();
            e.n_unit = unit.graph.num_nodes();
            e.n_asu = asu.graph.num_nodes();
            e.m_unit = unit.graph.num_edges();
            e.m_asu = asu.graph.num_edges();
            e.lg_unit = unit.line_graph->num_edges();
            e.lg_asu = asu.line_graph->num_edges();
            e.node_factor = ratio(e.n_unit, e.n_asu);
            e.edge_factor = ratio(e.m_unit, e.m_asu);
            e.lg_factor = ratio(e.lg_unit, e.lg_asu);
            slots[i] = e;
        } catch (const Error &err) {
            errors[i] = ExportFailure{input.structure.provenance(), std::string(to_string(err.kind())),
                                      err.what()};
        }
    });

    ReductionReport report;
    report.node_factor_hist = Histogram(1.0, 1.0, 48);
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (slots[i])
            report.entries.push_back(*slots[i]);
        if (errors[i])
            report.failures.push_back(*errors[i]);
    }
    if (report.entries.empty())
        return report;
    const double n = static_cast<double>(report.entries.size());
    double sn = 0.0, se = 0.0, sl = 0.0;
    for (const auto &e : report.entries) {
        sn += e.node_factor;
        se += e.edge_factor;
        sl += e.lg_factor;
        report.node_factor_hist.add(e.node_factor);
    }
    report.mean_node_factor = sn / n;
    report.mean_edge_factor = se / n;
    report.mean_lg_factor = sl / n;
    double var = 0.0;
    for (const auto &e : report.entries)
        var += (e.node_factor - report.mean_node_factor) * (e.node_factor - report.mean_node_factor);
    const double sd = std::sqrt(var / n);
    for (auto &e : report.entries)
        e.outlier = sd > 0.0 && std::abs(e.node_factor - report.mean_node_factor) > 2.0 * sd;
    return report;
}

nlohmann::ordered_json reduction_report_to_json(const ReductionReport &report) {
    nlohmann::ordered_json j;
    j["structures"] = report.entries.size();
    j["failures"] = report.failures.size();
    j["mean_node_factor"] = report.mean_node_factor;
    j["mean_edge_factor"] = report.mean_edge_factor;
    j["mean_lg_factor"] = report.mean_lg_factor;
    j["reference_factor"] = ReductionReport::kReferenceFactor;
    j["factors_in_bounds"] = report.factors_in_bounds();
    j["node_factor_histogram"] = histogram_to_json(report.node_factor_hist);
    auto entries = nlohmann::ordered_json::array();
    for (const auto &e : report.entries) {
        nlohmann::ordered_json r;
        r["id"] = e.id;
        r["ops"] = e.num_ops;
        r["n_unit"] = e.n_unit;
        r["n_asu"] = e.n_asu;
        r["m_unit"] = e.m_unit;
        r["m_asu"] = e.m_asu;
        r["lg_unit"] = e.lg_unit;
        r["lg_asu"] = e.lg_asu;
        r["node_factor"] = e.node_factor;
        r["edge_factor"] = e.edge_factor;
        r["lg_factor"] = e.lg_factor;
        r["outlier"] = e.outlier;
        entries.push_back(std::move(r));
    }
    j["entries"] = std::move(entries);
    auto failures = nlohmann::ordered_json::array();
    for (const auto &f : report.failures)
        failures.push_back({{"file", f.file}, {"kind", f.kind}, {"message", f.message}});
    j["failed"] = std::move(failures);
    return j;
}

std::string reduction_report_to_csv(const ReductionReport &report) {
    std::string out =
        "id,ops,n_unit,n_asu,m_unit,m_asu,lg_unit,lg_asu,node_factor,edge_factor,lg_factor,outlier\n";
    for (const auto &e : report.entries)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", e.id, e.num_ops, e.n_unit,
                           e.n_asu, e.m_unit, e.m_asu, e.lg_unit, e.lg_asu, e.node_factor,
                           e.edge_factor, e.lg_factor, e.outlier ? 1 : 0);
    return out;
}

} // namespace crystgraph
