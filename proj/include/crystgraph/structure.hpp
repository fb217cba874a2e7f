#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <string>
#include <vector>

namespace crystgraph {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using IVec3 = Eigen::Vector3i;
using IMat3 = Eigen::Matrix3i;

/// Periodic lattice. Rows of `basis()` are the lattice vectors a, b, c in Å,
/// so a fractional row vector f maps to cartesian f * basis.
class Lattice {
public:
    Lattice() = default;
    explicit Lattice(const Mat3 &basis);

    /// Crystallographic convention: a along x, b in the xy-plane. Angles in degrees.
    static Lattice from_parameters(double a, double b, double c, double alpha,
                                   double beta, double gamma);
    static Lattice cubic(double a) { return Lattice(Mat3::Identity() * a); }

    const Mat3 &basis() const { return m_basis; }
    double volume() const { return m_volume; }
    Mat3 metric() const { return m_basis * m_basis.transpose(); }

    Vec3 to_cart(const Vec3 &frac) const { return m_basis.transpose() * frac; }
    Vec3 to_frac(const Vec3 &cart) const { return m_inverse.transpose() * cart; }

    /// Distance between the lattice planes spanned by the other two vectors,
    /// one value per axis.
    const Vec3 &plane_spacings() const { return m_spacings; }
    double min_plane_spacing() const { return m_spacings.minCoeff(); }

    /// Cartesian form of a fractional-basis rotation (column convention).
    Mat3 cartesian_rotation(const IMat3 &frac_rotation) const;

private:
    Mat3 m_basis = Mat3::Identity();
    Mat3 m_inverse = Mat3::Identity();
    Vec3 m_spacings = Vec3::Ones();
    double m_volume = 1.0;
};

struct AtomSite {
    int species = 0;
    Vec3 frac = Vec3::Zero();
    int site_index = 0;
};

/// Minimum separation allowed between two sites under minimum image, Å.
inline constexpr double kMinSiteSeparation = 0.01;

/// Wraps each component into [0, 1), snapping values within 1e-12 of an
/// integer to zero.
Vec3 wrap_frac(const Vec3 &frac);

class CrystalStructure {
public:
    CrystalStructure() = default;
    /// Validates species, wraps coordinates and rejects overlapping sites.
    CrystalStructure(Lattice lattice, std::vector<AtomSite> sites,
                     std::string provenance = {});

    const Lattice &lattice() const { return m_lattice; }
    const std::vector<AtomSite> &sites() const { return m_sites; }
    const AtomSite &site(size_t i) const { return m_sites.at(i); }
    size_t size() const { return m_sites.size(); }
    bool empty() const { return m_sites.empty(); }
    const std::string &provenance() const { return m_provenance; }

    Vec3 cart(size_t i) const { return m_lattice.to_cart(m_sites[i].frac); }
    /// Cartesian position of site i shifted by a lattice offset.
    Vec3 image(size_t i, const IVec3 &offset) const {
        return m_lattice.to_cart(m_sites[i].frac + offset.cast<double>());
    }

private:
    Lattice m_lattice;
    std::vector<AtomSite> m_sites;
    std::string m_provenance;
};

Vec3 frac_to_cart(const Lattice &lattice, const Vec3 &frac);

struct MinImage {
    double distance = 0.0;
    IVec3 offset = IVec3::Zero();
};

/// Nearest periodic image of site j as seen from site i. For i == j the
/// trivial zero offset is excluded. Ties within 1e-12 Å resolve to the
/// lexicographically largest offset.
MinImage min_image_distance(const CrystalStructure &structure, size_t i, size_t j);

/// Replicates the cell reps[0] x reps[1] x reps[2] times; sites are ordered
/// cell-major, then by original site order.
CrystalStructure make_supercell(const CrystalStructure &structure, const IVec3 &reps);

/// Rigidly rotates the cartesian frame (basis * rotation).
CrystalStructure rotate(const CrystalStructure &structure, const Mat3 &rotation);

} // namespace crystgraph
