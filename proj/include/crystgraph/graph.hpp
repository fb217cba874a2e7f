#pragma once

#include <crystgraph/element.hpp>
#include <crystgraph/neighbors.hpp>
#include <crystgraph/structure.hpp>
#include <crystgraph/symmetry.hpp>

#include <Eigen/Core>

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace crystgraph {

enum class GraphKind { unit_cell, asymmetric_unit };

std::string_view to_string(GraphKind kind);

struct GraphNode {
    int species = 0;
    int multiplicity = 1;
    std::vector<double> features; // [Z, mass, radius, electronegativity, ionization, oxidation]
};

/// Directed periodic multigraph. Self-loops and multi-edges are allowed;
/// messages flow src -> dst.
struct CrystalGraph {
    std::string id;
    GraphKind kind = GraphKind::unit_cell;
    std::vector<GraphNode> nodes;
    std::vector<PeriodicEdge> edges;
    /// Per edge, the cartesian rotation taking the edge's frame into its
    /// source representative's frame. Empty means identity for every edge
    /// (unit-cell graphs).
    std::vector<Mat3> src_frames;

    size_t num_nodes() const { return nodes.size(); }
    size_t num_edges() const { return edges.size(); }
    std::vector<int> in_degree() const;
    std::vector<int> out_degree() const;
    int total_multiplicity() const;
    Mat3 src_frame(size_t edge) const {
        return src_frames.empty() ? Mat3::Identity() : src_frames[edge];
    }
};

CrystalGraph build_unit_graph(const CrystalStructure &structure,
                              const std::vector<PeriodicEdge> &edges);

/// One node per orbit. Each representative keeps its own incoming edges with
/// every source replaced by the source's orbit node.
CrystalGraph build_asu_graph(const CrystalStructure &structure,
                             const std::vector<PeriodicEdge> &edges, const OrbitMap &orbits);

enum class ReadoutMode { mean, sum, min, max, attention };

std::string_view to_string(ReadoutMode mode);
ReadoutMode readout_mode_from_string(std::string_view name);

/// Multiplicity-corrected node aggregation. Rows of `values` are nodes.
/// For attention, `scores` holds one logit per node; its softmax normaliser
/// counts every node with its multiplicity so that the mean-style correction
/// reproduces the expanded graph exactly.
Eigen::VectorXd asu_readout(const Eigen::MatrixXd &values, std::span<const int> multiplicities,
                            ReadoutMode mode, std::span<const double> scores = {});

double asu_readout(std::span<const double> values, std::span<const int> multiplicities,
                   ReadoutMode mode, std::span<const double> scores = {});

/// Graph NDJSON record; field names and order are fixed.
nlohmann::ordered_json graph_to_json(const CrystalGraph &graph);
CrystalGraph graph_from_json(const nlohmann::json &j);

} // namespace crystgraph
