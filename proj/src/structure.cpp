#include <crystgraph/element.hpp>
#include <crystgraph/error.hpp>
#include <crystgraph/structure.hpp>

#include <cmath>
#include <numbers>

namespace crystgraph {

Lattice::Lattice(const Mat3 &basis) : m_basis(basis) {
    m_volume = basis.determinant();
    if (!(m_volume > 0.0) || !std::isfinite(m_volume))
        throw Error(ErrorKind::InvalidStructure,
                    "lattice basis must be right-handed and non-degenerate");
    m_inverse = basis.inverse();
    const Vec3 a = basis.row(0), b = basis.row(1), c = basis.row(2);
    m_spacings = Vec3(m_volume / b.cross(c).norm(), m_volume / c.cross(a).norm(),
                      m_volume / a.cross(b).norm());
}

Lattice Lattice::from_parameters(double a, double b, double c, double alpha,
                                 double beta, double gamma) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double ca = std::cos(alpha * deg), cb = std::cos(beta * deg);
    const double cg = std::cos(gamma * deg), sg = std::sin(gamma * deg);
    const double cx = c * cb;
    const double cy = c * (ca - cb * cg) / sg;
    const double cz2 = c * c - cx * cx - cy * cy;
    if (!(cz2 > 0.0))
        throw Error(ErrorKind::InvalidStructure, "cell angles do not form a valid cell");
    Mat3 basis;
    basis << a, 0.0, 0.0, //
        b * cg, b * sg, 0.0, //
        cx, cy, std::sqrt(cz2);
    // Exact zeros for right angles keep orthogonal cells free of 1e-16 noise.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(basis(i, j)) < 1e-14 * std::max({a, b, c}))
                basis(i, j) = 0.0;
    return Lattice(basis);
}

Mat3 Lattice::cartesian_rotation(const IMat3 &frac_rotation) const {
    if (frac_rotation == IMat3::Identity())
        return Mat3::Identity();
    return m_basis.transpose() * frac_rotation.cast<double>() * m_inverse.transpose();
}

Vec3 wrap_frac(const Vec3 &frac) {
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
        double x = frac[k] - std::floor(frac[k]);
        if (x >= 1.0 - 1e-12 || x < 1e-12)
            x = 0.0;
        out[k] = x;
    }
    return out;
}

CrystalStructure::CrystalStructure(Lattice lattice, std::vector<AtomSite> sites,
                                   std::string provenance)
    : m_lattice(std::move(lattice)), m_sites(std::move(sites)),
      m_provenance(std::move(provenance)) {
    if (m_lattice.min_plane_spacing() <= 2.0 * kMinSiteSeparation)
        throw Error(ErrorKind::InvalidStructure, "lattice plane spacing too small");
    for (size_t i = 0; i < m_sites.size(); ++i) {
        auto &s = m_sites[i];
        if (s.species < 1 || s.species > kMaxAtomicNumber)
            throw Error(ErrorKind::InvalidStructure,
                        "invalid species " + std::to_string(s.species));
        if (!s.frac.allFinite())
            throw Error(ErrorKind::InvalidStructure, "non-finite fractional coordinate");
        s.frac = wrap_frac(s.frac);
        s.site_index = static_cast<int>(i);
    }
    // Any image closer than kMinSiteSeparation has every fractional component
    // of its difference below 0.5 in magnitude, so the wrapped delta is the
    // only candidate.
    for (size_t i = 0; i < m_sites.size(); ++i) {
        for (size_t j = i + 1; j < m_sites.size(); ++j) {
            Vec3 delta = m_sites[j].frac - m_sites[i].frac;
            delta = delta.array() - delta.array().round();
            if (m_lattice.to_cart(delta).norm() < kMinSiteSeparation)
                throw Error(ErrorKind::InvalidStructure,
                            "sites " + std::to_string(i) + " and " + std::to_string(j) +
                                " overlap");
        }
    }
}

Vec3 frac_to_cart(const Lattice &lattice, const Vec3 &frac) { return lattice.to_cart(frac); }

namespace {

bool lex_greater(const IVec3 &a, const IVec3 &b) {
    for (int k = 0; k < 3; ++k) {
        if (a[k] != b[k])
            return a[k] > b[k];
    }
    return false;
}

} // namespace

MinImage min_image_distance(const CrystalStructure &structure, size_t i, size_t j) {
    const auto &lattice = structure.lattice();
    const Vec3 fi = structure.site(i).frac;
    const Vec3 fj = structure.site(j).frac;
    const Vec3 delta = fj - fi;
    const Vec3 rounded = delta.array().round();
    const IVec3 base = (-rounded).cast<int>();
    // Upper bound on the minimum: the wrapped image itself, or for i == j the
    // shortest lattice vector candidate along an axis.
    double target = lattice.to_cart(delta - rounded).norm();
    if (i == j)
        target = lattice.basis().rowwise().norm().minCoeff();
    const int window =
        static_cast<int>(std::ceil(target / lattice.min_plane_spacing())) + 1;

    constexpr double tie_tol = 1e-12;
    MinImage best{std::numeric_limits<double>::infinity(), IVec3::Zero()};
    for (int a = -window; a <= window; ++a) {
        for (int b = -window; b <= window; ++b) {
            for (int c = -window; c <= window; ++c) {
                const IVec3 n = base + IVec3(a, b, c);
                if (i == j && n.isZero())
                    continue;
                const double d = lattice.to_cart(delta + n.cast<double>()).norm();
                if (d < best.distance - tie_tol) {
                    best = {d, n};
                } else if (d <= best.distance + tie_tol && lex_greater(n, best.offset)) {
                    best = {std::min(d, best.distance), n};
                }
            }
        }
    }
    return best;
}

CrystalStructure make_supercell(const CrystalStructure &structure, const IVec3 &reps) {
    if ((reps.array() < 1).any())
        throw Error(ErrorKind::InvalidStructure, "supercell repetitions must be >= 1");
    Mat3 basis = structure.lattice().basis();
    for (int k = 0; k < 3; ++k)
        basis.row(k) *= reps[k];
    const Vec3 scale = reps.cast<double>().cwiseInverse();
    std::vector<AtomSite> sites;
    sites.reserve(structure.size() * static_cast<size_t>(reps.prod()));
    for (int a = 0; a < reps[0]; ++a) {
        for (int b = 0; b < reps[1]; ++b) {
            for (int c = 0; c < reps[2]; ++c) {
                const Vec3 shift(a, b, c);
                for (const auto &s : structure.sites()) {
                    AtomSite copy = s;
                    copy.frac = (s.frac + shift).cwiseProduct(scale);
                    sites.push_back(copy);
                }
            }
        }
    }
    return CrystalStructure(Lattice(basis), std::move(sites), structure.provenance());
}

CrystalStructure rotate(const CrystalStructure &structure, const Mat3 &rotation) {
    return CrystalStructure(Lattice(structure.lattice().basis() * rotation),
                            structure.sites(), structure.provenance());
}

} // namespace crystgraph
