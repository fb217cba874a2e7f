#pragma once

#include <crystgraph/pipeline.hpp>

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace crystgraph {

/// Fixed-width bins [lo + i w, lo + (i+1) w); values outside land in
/// underflow/overflow so that every value is counted once.
struct Histogram {
    double lo = 0.0;
    double width = 1.0;
    std::vector<size_t> counts;
    size_t underflow = 0;
    size_t overflow = 0;

    Histogram() = default;
    Histogram(double lo, double width, size_t bins);

    void add(double value);
    size_t total() const;
    std::vector<double> bin_edges() const;
};

nlohmann::ordered_json histogram_to_json(const Histogram &h);

inline constexpr double kDegreeBinWidth = 1.0;
inline constexpr size_t kDegreeBins = 64;
inline constexpr double kDistanceBinWidth = 0.1;
inline constexpr double kDistanceMax = 12.0;
inline constexpr size_t kNodeCountBins = 256;

struct GraphSummary {
    std::string id;
    size_t n_nodes = 0;
    size_t n_edges = 0;
    double avg_degree = 0.0; // edges per node
    std::optional<size_t> n_lg_edges;
};

GraphSummary summarize(const GraphBundle &bundle);

struct CorpusStats {
    std::vector<GraphSummary> graphs;
    Histogram degree;     // per graph, average degree
    Histogram node_count; // per graph
    Histogram distance;   // per edge, angstrom
    double mean_nodes = 0.0;
    double mean_edges = 0.0;
    double mean_degree = 0.0;
};

CorpusStats corpus_stats(const std::vector<GraphBundle> &graphs);
nlohmann::ordered_json corpus_stats_to_json(const CorpusStats &stats);

struct SweepPoint {
    EdgeMethod method = EdgeMethod::knn;
    double param = 0.0; // k for knn, r for radius, unused for voronoi
};

struct SweepRow {
    SweepPoint point;
    size_t structures = 0;
    size_t failures = 0;
    double mean_degree = 0.0;
    double std_degree = 0.0;
    double min_degree = 0.0;
    double max_degree = 0.0;
};

/// knn k = 1..32, radius r = 2..8 step 0.5, voronoi.
std::vector<SweepPoint> default_sweep_grid();

std::vector<SweepRow> sweep_connectivity(const std::vector<CifStructure> &corpus,
                                         const std::vector<SweepPoint> &grid, int jobs = 1);
std::string sweep_to_csv(const std::vector<SweepRow> &rows);
nlohmann::ordered_json sweep_to_json(const std::vector<SweepRow> &rows);

struct ReductionEntry {
    std::string id;
    size_t num_ops = 1;
    size_t n_unit = 0, n_asu = 0;
    size_t m_unit = 0, m_asu = 0;
    size_t lg_unit = 0, lg_asu = 0;
    double node_factor = 1.0;
    double edge_factor = 1.0;
    double lg_factor = 1.0;
    bool outlier = false;
};

struct ReductionReport {
    std::vector<ReductionEntry> entries;
    std::vector<ExportFailure> failures;
    double mean_node_factor = 1.0;
    double mean_edge_factor = 1.0;
    double mean_lg_factor = 1.0;
    Histogram node_factor_hist; // bins of width 1 on [1, 49)

    /// Corpus-average factor quoted for a large benchmark collection; shown
    /// for comparison only.
    static constexpr double kReferenceFactor = 2.1;

    /// Every factor of every entry lies in [1, 48].
    bool factors_in_bounds() const;
};

/// Unit and asymmetric-unit graphs under `config` (config.asu and
/// config.line_graph are overridden; the line graph uses the destination
/// variant unless one is set). Entries whose node factor is more than two
/// standard deviations from the corpus mean are flagged as outliers.
ReductionReport asu_reduction_report(const std::vector<CifStructure> &corpus,
                                     PipelineConfig config, int jobs = 1);
nlohmann::ordered_json reduction_report_to_json(const ReductionReport &report);
std::string reduction_report_to_csv(const ReductionReport &report);

} // namespace crystgraph
