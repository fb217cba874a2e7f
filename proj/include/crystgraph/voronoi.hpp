#pragma once

#include <crystgraph/neighbors.hpp>
#include <crystgraph/structure.hpp>

#include <vector>

namespace crystgraph {

struct VoronoiFace {
    int neighbor = 0;
    IVec3 offset = IVec3::Zero();
    double area = 0.0;
    Vec3 centroid = Vec3::Zero(); // cartesian, Å
};

struct VoronoiCell {
    int owner = 0;
    std::vector<VoronoiFace> faces; // ordered by neighbor distance, then neighbor, offset
    double volume = 0.0;
    std::vector<Vec3> vertices; // cartesian, Å
};

inline constexpr double kDefaultAreaEpsilon = 1e-7;

/// Plain (unweighted) periodic Voronoi cell of every site. Faces with area
/// <= area_epsilon are dropped. Throws Error(DegenerateCell) if a cell does
/// not close.
std::vector<VoronoiCell> voronoi_cells(const CrystalStructure &structure,
                                       double area_epsilon = kDefaultAreaEpsilon);

VoronoiCell voronoi_cell(const CrystalStructure &structure, int site,
                         double area_epsilon = kDefaultAreaEpsilon);

/// One incoming edge per face of every cell (src = face neighbor), so the
/// edge set is symmetric.
std::vector<PeriodicEdge> voronoi_edges(const CrystalStructure &structure,
                                        bool include_ridge_area = false,
                                        double area_epsilon = kDefaultAreaEpsilon);

/// Area of a planar polygon given in order.
double polygon_area(const std::vector<Vec3> &polygon);

} // namespace crystgraph
