#pragma once

#include <crystgraph/cif.hpp>
#include <crystgraph/graph.hpp>
#include <crystgraph/line_graph.hpp>
#include <crystgraph/ngn.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crystgraph {

enum class EdgeMethod { knn, radius, voronoi };
enum class SymmetrySource { detect, cif, none };

std::string_view to_string(EdgeMethod method);
EdgeMethod edge_method_from_string(std::string_view name);
std::string_view to_string(SymmetrySource source);
SymmetrySource symmetry_source_from_string(std::string_view name);

struct PipelineConfig {
    EdgeMethod method = EdgeMethod::knn;
    int k = 24;
    double tie_epsilon = 1e-9;
    double r = 5.0;
    bool symmetrize = false;
    bool ridge_area = false;
    double area_epsilon = 1e-7;

    bool asu = false;
    SymmetrySource symmetry = SymmetrySource::detect;
    double symprec = 1e-5;

    std::optional<LineGraphVariant> line_graph; // none = no line graph
    int line_graph_order = 1;                   // 1 or 2
    bool keep_backtrack = false;

    void validate() const;
};

std::vector<PeriodicEdge> build_edges(const CrystalStructure &structure,
                                      const PipelineConfig &config);

/// Operations chosen by config.symmetry. `cif` falls back to identity when
/// the file lists none.
std::vector<SymmetryOp> symmetry_ops_for(const CifStructure &input, const PipelineConfig &config);

struct GraphBundle {
    CrystalGraph graph;
    std::optional<LineGraph> line_graph;
    std::optional<LineGraph> line_graph2;
};

GraphBundle build_graph(const CifStructure &input, const PipelineConfig &config);

/// Graph record plus "angles" (order 1) and "lg2" (order 2) when present.
nlohmann::ordered_json graph_record(const GraphBundle &bundle);

/// CRYSTGRAPH_JOBS if set and positive, otherwise the hardware concurrency.
int default_jobs();

/// Runs task(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by a task is rethrown after all threads finish.
void parallel_for(size_t count, int jobs, const std::function<void(size_t)> &task);

/// Runs task(i) for i in [0, count) on up to `jobs` threads and hands each
/// result to `sink` in index order from the calling thread.
void ordered_parallel(size_t count, int jobs, const std::function<std::string(size_t)> &task,
                      const std::function<void(size_t, std::string)> &sink);

/// Expands directories into their .cif/.json files, sorted by path.
std::vector<std::filesystem::path> collect_inputs(const std::vector<std::filesystem::path> &paths);

struct ExportFailure {
    std::string file;
    std::string kind;
    std::string message;
};

struct ExportSummary {
    size_t succeeded = 0;
    std::vector<ExportFailure> failures;
};

/// parse -> edges -> (asu) -> (line graph) -> one NDJSON line per input.
/// Failed inputs write nothing to `out`.
ExportSummary export_corpus(const std::vector<std::filesystem::path> &inputs,
                            const PipelineConfig &config, std::ostream &out, int jobs);

/// One NDJSON line per failure: {"file", "kind", "message"}.
std::string failure_report(const std::vector<ExportFailure> &failures);

/// Forward pass over NDJSON graph records; one output line per record with
/// id, prediction, config hash and parameter checksum.
ExportSummary forward_ndjson(std::istream &in, const NgnConfig &config, std::ostream &out,
                             int jobs);

} // namespace crystgraph
