#pragma once

#include <crystgraph/structure.hpp>

#include <optional>
#include <vector>

namespace crystgraph {

/// Directed edge from a periodic image of `src` into `dst` (home cell).
/// `vector` points from the dst atom to the src image.
struct PeriodicEdge {
    int src = 0;
    int dst = 0;
    IVec3 offset = IVec3::Zero();
    Vec3 vector = Vec3::Zero();
    double distance = 0.0;
    std::optional<double> ridge_area;
    /// Original source site before orbit merging (asymmetric-unit graphs
    /// only, -1 otherwise). Kept for audit alongside `offset`.
    int src_site = -1;
};

enum class NeighborMethod { knn, radius };

struct NeighborConfig {
    NeighborMethod method = NeighborMethod::knn;
    int k = 24;
    double r = 5.0;
    double tie_epsilon = 1e-9;
    bool symmetrize = false;

    void validate() const;
};

/// Ordering used for every edge list: dst, distance, src, offset.
bool edge_less(const PeriodicEdge &a, const PeriodicEdge &b);

/// Incoming k nearest periodic images per atom, extended by every image
/// within tie_epsilon of the k-th distance.
std::vector<PeriodicEdge> knn_edges(const CrystalStructure &structure, int k,
                                    double tie_epsilon = 1e-9);

/// All directed image pairs with 0 < distance <= r.
std::vector<PeriodicEdge> radius_edges(const CrystalStructure &structure, double r);

std::vector<PeriodicEdge> neighbor_edges(const CrystalStructure &structure,
                                         const NeighborConfig &config);

/// Adds the reverse (dst -> src, -offset) of every edge that lacks one.
std::vector<PeriodicEdge> symmetrize_edges(std::vector<PeriodicEdge> edges);

/// Builds an edge between two sites, vector = cart(frac_src + offset - frac_dst).
/// The difference is formed so that the reverse edge is the exact negation.
PeriodicEdge make_edge(const CrystalStructure &structure, int src, int dst,
                       const IVec3 &offset);

/// Periodic image of `src` seen from a home-cell site; fields as in PeriodicEdge.
struct NeighborImage {
    int src = 0;
    IVec3 offset = IVec3::Zero();
    Vec3 vector = Vec3::Zero();
    double distance = 0.0;
};

/// Cell-list search: for every site in `dsts`, all periodic images within
/// `cutoff` (inclusive) excluding the zero-offset self pair. Per-dst lists
/// are sorted by distance, src, offset.
std::vector<std::vector<NeighborImage>> images_within(const CrystalStructure &structure,
                                                     double cutoff,
                                                     const std::vector<int> &dsts);

} // namespace crystgraph
