#pragma once

#include <crystgraph/structure.hpp>
#include <crystgraph/symmetry_op.hpp>

#include <optional>
#include <vector>

namespace crystgraph {

inline constexpr double kDefaultSymprec = 1e-5;
inline constexpr size_t kMaxSymmetryOps = 192;

struct SymmetryDetection {
    std::vector<SymmetryOp> ops; // identity first
    bool reduction_failed = false; // fell back to identity only
    bool capped = false;           // more than kMaxSymmetryOps were found
};

/// Delaunay-reduced basis of `lattice`. Returns the integer transform M with
/// reduced rows = M * basis (det M = 1), or nothing if reduction stalls.
std::optional<IMat3> reduce_basis(const Lattice &lattice);

/// Detects the operations that map the structure onto itself.
/// `symprec` is a fractional-coordinate tolerance.
SymmetryDetection find_symmetry(const CrystalStructure &structure,
                                double symprec = kDefaultSymprec);

std::vector<SymmetryOp> find_symmetry_ops(const CrystalStructure &structure,
                                          double symprec = kDefaultSymprec);

/// Site permutation induced by `op`, or throws Error(InconsistentOps).
std::vector<int> site_permutation(const CrystalStructure &structure, const SymmetryOp &op,
                                  double symprec = kDefaultSymprec);

/// Partition of sites into symmetry orbits.
struct OrbitMap {
    std::vector<int> representative_of; // per site
    std::vector<SymmetryOp> op_to_rep;  // per site: maps the site onto its representative
    std::vector<int> representatives;   // ascending site indices
    std::vector<int> multiplicity;      // per representative

    size_t num_orbits() const { return representatives.size(); }
    /// Position of a representative site in `representatives`.
    int orbit_index(int site) const;

private:
    friend OrbitMap compute_orbits(const CrystalStructure &, const std::vector<SymmetryOp> &,
                                   double);
    std::vector<int> m_orbit_index; // per site
};

/// Representative = smallest site index of each orbit.
OrbitMap compute_orbits(const CrystalStructure &structure, const std::vector<SymmetryOp> &ops,
                        double symprec = kDefaultSymprec);

/// Every site in its own orbit.
OrbitMap trivial_orbits(const CrystalStructure &structure);

} // namespace crystgraph
