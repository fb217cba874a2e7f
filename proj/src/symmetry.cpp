#include <crystgraph/error.hpp>
#include <crystgraph/symmetry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>

namespace crystgraph {

std::optional<IMat3> reduce_basis(const Lattice &lattice) {
    // Delaunay (Selling) reduction on the superbase b0..b3, b3 = -(b0+b1+b2).
    const Mat3 &basis = lattice.basis();
    std::array<Vec3, 4> b;
    std::array<Vec3, 4> coeff; // integer combinations of the input rows
    for (int i = 0; i < 3; ++i) {
        b[static_cast<size_t>(i)] = basis.row(i);
        coeff[static_cast<size_t>(i)] = Vec3::Unit(i);
    }
    b[3] = -(b[0] + b[1] + b[2]);
    coeff[3] = -(coeff[0] + coeff[1] + coeff[2]);
    const double tol = 1e-10 * basis.rowwise().squaredNorm().maxCoeff();

    bool reduced = false;
    for (int iter = 0; iter < 1000 && !reduced; ++iter) {
        reduced = true;
        for (size_t i = 0; i < 4 && reduced; ++i) {
            for (size_t j = i + 1; j < 4 && reduced; ++j) {
                if (b[i].dot(b[j]) > tol) {
                    for (size_t k = 0; k < 4; ++k) {
                        if (k != i && k != j) {
                            b[k] += b[i];
                            coeff[k] += coeff[i];
                        }
                    }
                    b[i] = -b[i];
                    coeff[i] = -coeff[i];
                    reduced = false;
                }
            }
        }
    }
    if (!reduced)
        return std::nullopt;

    // Pick the three shortest candidates that form a unimodular basis.
    std::vector<std::pair<Vec3, Vec3>> cand = {
        {b[0], coeff[0]}, {b[1], coeff[1]}, {b[2], coeff[2]},
        {b[3], coeff[3]}, {b[0] + b[1], coeff[0] + coeff[1]},
        {b[1] + b[2], coeff[1] + coeff[2]}, {b[2] + b[0], coeff[2] + coeff[0]}};
    std::stable_sort(cand.begin(), cand.end(), [](const auto &x, const auto &y) {
        return x.first.squaredNorm() < y.first.squaredNorm() - 1e-12;
    });
    for (size_t i = 0; i < cand.size(); ++i) {
        for (size_t j = i + 1; j < cand.size(); ++j) {
            for (size_t k = j + 1; k < cand.size(); ++k) {
                Mat3 m;
                m.row(0) = cand[i].second;
                m.row(1) = cand[j].second;
                m.row(2) = cand[k].second;
                const double det = m.determinant();
                if (std::abs(std::abs(det) - 1.0) > 1e-9)
                    continue;
                if (det < 0)
                    m.row(2) = -m.row(2);
                return IMat3(m.array().round().cast<int>());
            }
        }
    }
    return std::nullopt;
}

namespace {

// Index of the site matching `frac` with the same species, or -1.
int match_site(const CrystalStructure &structure, const Vec3 &frac, int species,
               double symprec) {
    for (size_t j = 0; j < structure.size(); ++j) {
        const auto &s = structure.site(j);
        if (s.species != species)
            continue;
        Vec3 d = frac - s.frac;
        d = d.array() - d.array().round();
        if (d.cwiseAbs().maxCoeff() <= symprec)
            return static_cast<int>(j);
    }
    return -1;
}

bool is_permutation(const CrystalStructure &structure, const SymmetryOp &op, double symprec,
                    std::vector<int> *perm) {
    std::vector<int> out(structure.size(), -1);
    std::vector<char> hit(structure.size(), 0);
    for (size_t i = 0; i < structure.size(); ++i) {
        const auto &s = structure.site(i);
        const int j = match_site(structure, op.apply(s.frac), s.species, symprec);
        if (j < 0 || hit[static_cast<size_t>(j)])
            return false;
        hit[static_cast<size_t>(j)] = 1;
        out[i] = j;
    }
    if (perm)
        *perm = std::move(out);
    return true;
}

std::vector<IMat3> lattice_rotations(const Lattice &lattice, const IMat3 &to_reduced,
                                     double symprec) {
    const Mat3 reduced = to_reduced.cast<double>() * lattice.basis();
    const Mat3 g = reduced * reduced.transpose();
    const double scale = g.diagonal().maxCoeff();
    const double tol = std::max(symprec, 1e-8) * 10.0 * scale;

    const Mat3 mt = to_reduced.transpose().cast<double>();
    const Mat3 mt_inv = mt.inverse();
    std::vector<IMat3> out;
    std::array<int, 9> e{};
    for (int code = 0; code < 19683; ++code) {
        int c = code;
        for (int k = 0; k < 9; ++k) {
            e[static_cast<size_t>(k)] = c % 3 - 1;
            c /= 3;
        }
        IMat3 w;
        w << e[0], e[1], e[2], e[3], e[4], e[5], e[6], e[7], e[8];
        const int det = w.determinant();
        if (det != 1 && det != -1)
            continue;
        const Mat3 wd = w.cast<double>();
        if ((wd.transpose() * g * wd - g).cwiseAbs().maxCoeff() > tol)
            continue;
        // Back to the input basis: f_input = M^T f_reduced.
        const Mat3 in_basis = mt * wd * mt_inv;
        out.push_back(in_basis.array().round().cast<int>());
    }
    // Identity first, the rest in a stable lexicographic order.
    std::sort(out.begin(), out.end(), [](const IMat3 &a, const IMat3 &b) {
        const bool ia = a == IMat3::Identity(), ib = b == IMat3::Identity();
        if (ia != ib)
            return ia;
        return std::lexicographical_compare(a.data(), a.data() + 9, b.data(), b.data() + 9);
    });
    return out;
}

bool contains(const std::vector<SymmetryOp> &ops, const SymmetryOp &op, double tol) {
    return std::any_of(ops.begin(), ops.end(),
                       [&](const SymmetryOp &o) { return o.equivalent(op, tol); });
}

} // namespace

SymmetryDetection find_symmetry(const CrystalStructure &structure, double symprec) {
    SymmetryDetection result;
    if (structure.empty()) {
        result.ops.push_back(SymmetryOp::identity());
        return result;
    }
    const auto to_reduced = reduce_basis(structure.lattice());
    if (!to_reduced) {
        result.reduction_failed = true;
        result.ops.push_back(SymmetryOp::identity());
        return result;
    }

    // Anchor on the rarest species (smallest Z on ties).
    std::map<int, int> counts;
    for (const auto &s : structure.sites())
        ++counts[s.species];
    int anchor_species = counts.begin()->first;
    for (const auto &[z, n] : counts)
        if (n < counts[anchor_species])
            anchor_species = z;
    size_t anchor = 0;
    while (structure.site(anchor).species != anchor_species)
        ++anchor;

    for (const IMat3 &w : lattice_rotations(structure.lattice(), *to_reduced, symprec)) {
        const Vec3 moved = w.cast<double>() * structure.site(anchor).frac;
        for (const auto &s : structure.sites()) {
            if (s.species != anchor_species)
                continue;
            SymmetryOp op{w, reduce_translation(s.frac - moved)};
            if (contains(result.ops, op, symprec) || !is_permutation(structure, op, symprec, nullptr))
                continue;
            if (result.ops.size() >= kMaxSymmetryOps) {
                result.capped = true;
                break;
            }
            result.ops.push_back(op);
        }
    }
    if (result.ops.empty() || !result.ops.front().is_identity())
        result.ops.insert(result.ops.begin(), SymmetryOp::identity());

    // Closure under composition.
    for (size_t i = 0; i < result.ops.size() && !result.capped; ++i) {
        for (size_t j = 0; j < result.ops.size(); ++j) {
            const SymmetryOp prod = result.ops[i].compose(result.ops[j]);
            if (contains(result.ops, prod, symprec))
                continue;
            if (result.ops.size() >= kMaxSymmetryOps) {
                result.capped = true;
                break;
            }
            result.ops.push_back(prod);
        }
    }
    return result;
}

std::vector<SymmetryOp> find_symmetry_ops(const CrystalStructure &structure, double symprec) {
    return find_symmetry(structure, symprec).ops;
}

std::vector<int> site_permutation(const CrystalStructure &structure, const SymmetryOp &op,
                                  double symprec) {
    std::vector<int> perm;
    if (!is_permutation(structure, op, symprec, &perm))
        throw Error(ErrorKind::InconsistentOps,
                    "operation " + op.to_xyz() + " does not permute the sites");
    return perm;
}

int OrbitMap::orbit_index(int site) const { return m_orbit_index.at(static_cast<size_t>(site)); }

OrbitMap compute_orbits(const CrystalStructure &structure, const std::vector<SymmetryOp> &ops,
                        double symprec) {
    const size_t n = structure.size();
    std::vector<std::vector<int>> perms;
    perms.reserve(ops.size());
    for (const auto &op : ops)
        perms.push_back(site_permutation(structure, op, symprec));

    OrbitMap map;
    map.representative_of.assign(n, -1);
    map.op_to_rep.assign(n, SymmetryOp::identity());
    map.m_orbit_index.assign(n, -1);
    for (size_t r = 0; r < n; ++r) {
        if (map.representative_of[r] >= 0)
            continue;
        const int rep = static_cast<int>(r);
        const int orbit = static_cast<int>(map.representatives.size());
        map.representatives.push_back(rep);
        int count = 0;
        // Breadth-first over the generated group; from_rep[s] maps rep -> s.
        std::vector<SymmetryOp> from_rep(n);
        std::deque<int> queue{rep};
        map.representative_of[r] = rep;
        map.m_orbit_index[r] = orbit;
        while (!queue.empty()) {
            const int s = queue.front();
            queue.pop_front();
            ++count;
            for (size_t k = 0; k < ops.size(); ++k) {
                const int t = perms[k][static_cast<size_t>(s)];
                if (map.representative_of[static_cast<size_t>(t)] >= 0)
                    continue;
                map.representative_of[static_cast<size_t>(t)] = rep;
                map.m_orbit_index[static_cast<size_t>(t)] = orbit;
                from_rep[static_cast<size_t>(t)] = ops[k].compose(from_rep[static_cast<size_t>(s)]);
                map.op_to_rep[static_cast<size_t>(t)] = from_rep[static_cast<size_t>(t)].inverse();
                queue.push_back(t);
            }
        }
        map.multiplicity.push_back(count);
    }
    return map;
}

OrbitMap trivial_orbits(const CrystalStructure &structure) {
    return compute_orbits(structure, {SymmetryOp::identity()});
}

} // namespace crystgraph
