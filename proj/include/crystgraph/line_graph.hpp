#pragma once

#include <crystgraph/graph.hpp>

#include <optional>
#include <vector>

namespace crystgraph {

enum class LineGraphVariant {
    path,        // e_ij -> e_jk, angle between the two edge vectors
    destination, // e_ij <-> e_kj, angle between the two incoming vectors at j
};

std::string_view to_string(LineGraphVariant variant);
LineGraphVariant line_graph_variant_from_string(std::string_view name);

struct LineGraphEdge {
    int a = 0; // source line-graph node
    int b = 0; // destination line-graph node
};

/// Graph over the edges of a base graph: node i is base edge i. Order-1
/// line graphs carry one angle per edge; higher orders are topology only.
struct LineGraph {
    LineGraphVariant variant = LineGraphVariant::destination;
    int order = 1;
    size_t num_nodes = 0;
    std::vector<LineGraphEdge> edges;
    std::vector<double> angles; // radians, parallel to `edges` (order 1 only)

    size_t num_edges() const { return edges.size(); }
};

/// Angle in [0, pi] between two non-zero vectors.
double angle_between(const Vec3 &v1, const Vec3 &v2);

/// A path pair is a backtrack when the second edge ends at the first edge's
/// source node and |v_in + v_out| is below this (angstrom). Distinct images
/// of one node are at least kMinSiteSeparation apart.
inline constexpr double kBacktrackTolerance = 0.1 * kMinSiteSeparation;

/// `keep_backtrack` retains path pairs whose second edge is the exact
/// reverse image of the first.
LineGraph line_graph(const CrystalGraph &base, LineGraphVariant variant,
                     bool keep_backtrack = false);

/// Applies the same variant rule with `lg` as the base graph.
LineGraph line_graph_order2(const LineGraph &lg, bool keep_backtrack = false);

/// Adds {"angles": [{"a", "b", "ang"}]} to a graph record.
void add_line_graph_json(nlohmann::ordered_json &record, const LineGraph &lg);
/// Reads the "angles" array of a record, if present.
std::optional<LineGraph> line_graph_from_json(const nlohmann::json &record, size_t num_base_edges);

} // namespace crystgraph
