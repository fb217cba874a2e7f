#include "fixtures.hpp"

#include <crystgraph/error.hpp>
#include <crystgraph/symmetry.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <set>

using namespace crystgraph;

namespace {

// Union-find over all (op, site) images.
std::vector<int> brute_orbits(const CrystalStructure &s, const std::vector<SymmetryOp> &ops) {
    std::vector<int> parent(s.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x)
            x = parent[static_cast<size_t>(x)];
        return x;
    };
    for (const auto &op : ops)
        for (size_t i = 0; i < s.size(); ++i) {
            const Vec3 p = op.apply(s.site(i).frac);
            for (size_t j = 0; j < s.size(); ++j) {
                Vec3 d = p - s.site(j).frac;
                d = d.array() - d.array().round();
                if (d.cwiseAbs().maxCoeff() < 1e-6) {
                    const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
                    parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
                }
            }
        }
    std::vector<int> rep(s.size());
    for (size_t i = 0; i < s.size(); ++i)
        rep[i] = find(static_cast<int>(i));
    return rep;
}

bool contains(const std::vector<SymmetryOp> &ops, const SymmetryOp &op) {
    for (const auto &o : ops)
        if (o.equivalent(op, 1e-6))
            return true;
    return false;
}

// Brute force: every {-1,0,1} matrix in the input basis of a cubic cell that
// preserves the metric, times every translation mapping the structure onto itself.
size_t brute_op_count(const CrystalStructure &s) {
    size_t count = 0;
    const Mat3 g = s.lattice().metric();
    for (int code = 0; code < 19683; ++code) {
        IMat3 w;
        int c = code;
        for (int k = 0; k < 9; ++k) {
            w(k / 3, k % 3) = c % 3 - 1;
            c /= 3;
        }
        const Mat3 wd = w.cast<double>();
        if (std::abs(std::abs(wd.determinant()) - 1.0) > 1e-9)
            continue;
        if ((wd.transpose() * g * wd - g).norm() > 1e-8)
            continue;
        std::vector<Vec3> translations;
        for (size_t j = 0; j < s.size(); ++j) {
            SymmetryOp op{w, reduce_translation(s.site(j).frac - wd * s.site(0).frac)};
            bool seen = false;
            for (const auto &t : translations)
                seen = seen || (t - op.translation).norm() < 1e-9;
            if (seen)
                continue;
            try {
                site_permutation(s, op, 1e-6);
                translations.push_back(op.translation);
                ++count;
            } catch (const Error &) {
            }
        }
    }
    return count;
}

} // namespace

TEST_CASE("simple cubic has the full cubic point group") {
    const auto sc = fixtures::simple_cubic(3.0);
    const auto ops = find_symmetry_ops(sc);
    CHECK(ops.size() == 48);
    CHECK(ops.size() == brute_op_count(sc));
    CHECK(ops.front().is_identity());
    for (const auto &op : ops)
        CHECK(op.translation.isZero());
}

TEST_CASE("rocksalt conventional cell has 192 operations") {
    const auto nacl = fixtures::rocksalt();
    const auto ops = find_symmetry_ops(nacl);
    CHECK(ops.size() == 192);
    CHECK(ops.size() == brute_op_count(nacl));
    // 48 point operations times 4 pure translations.
    std::set<std::vector<int>> rotations;
    size_t pure = 0;
    for (const auto &op : ops) {
        rotations.insert(std::vector<int>(op.rotation.data(), op.rotation.data() + 9));
        pure += op.rotation == IMat3::Identity();
    }
    CHECK(rotations.size() == 48);
    CHECK(pure == 4);
}

TEST_CASE("detected ops form a group and preserve the metric") {
    for (const auto &name : {"TiO2_rutile", "Zn_hcp", "GaN_wurtzite", "monoclinic_p2m_1"}) {
        const auto s = fixtures::load_corpus_file(name).structure;
        const auto ops = find_symmetry_ops(s);
        const Mat3 g = s.lattice().metric();
        for (const auto &a : ops) {
            const Mat3 w = a.rotation.cast<double>();
            CHECK((w.transpose() * g * w - g).norm() < 1e-6 * g.norm());
            CHECK(contains(ops, a.inverse()));
            for (const auto &b : ops)
                CHECK(contains(ops, a.compose(b)));
        }
        std::set<std::vector<int>> rotations;
        size_t pure = 0;
        for (const auto &op : ops) {
            rotations.insert(std::vector<int>(op.rotation.data(), op.rotation.data() + 9));
            pure += op.rotation == IMat3::Identity();
        }
        CHECK(ops.size() == rotations.size() * pure);
    }
}

TEST_CASE("perturbation destroys symmetry") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        const auto s = fixtures::random_structure(rng, 4);
        auto sites = s.sites();
        std::normal_distribution<double> n(0.0, 1e-3);
        for (auto &site : sites)
            site.frac += Vec3(n(rng), n(rng), n(rng));
        const CrystalStructure p(s.lattice(), sites);
        const auto ops = find_symmetry_ops(p, 1e-9);
        CHECK(ops.size() == 1);
        CHECK(ops[0].is_identity());
    }
}

TEST_CASE("orbit examples") {
    const auto nacl = fixtures::rocksalt();
    const auto orbits = compute_orbits(nacl, find_symmetry_ops(nacl));
    CHECK(orbits.num_orbits() == 2);
    CHECK(orbits.multiplicity == std::vector<int>{4, 4});

    const auto trivial = trivial_orbits(nacl);
    CHECK(trivial.num_orbits() == 8);
    for (int m : trivial.multiplicity)
        CHECK(m == 1);

    // Two atoms related by the mirror z -> -z.
    const CrystalStructure mirror(Lattice::from_parameters(3, 4, 5, 90, 90, 90),
                                  {{16, Vec3(0.1, 0.2, 0.3), 0}, {16, Vec3(0.1, 0.2, 0.7), 1}});
    const auto m = compute_orbits(mirror, {SymmetryOp::identity(), parse_xyz_op("x,y,-z")});
    CHECK(m.num_orbits() == 1);
    CHECK(m.multiplicity == std::vector<int>{2});
    CHECK(compute_orbits(mirror, find_symmetry_ops(mirror)).multiplicity == std::vector<int>{2});
}

TEST_CASE("orbits match union-find oracle and op_to_rep maps onto representatives") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 40; ++t) {
        const auto input = fixtures::random_symmetric(rng);
        const auto &s = input.structure;
        const auto ops = find_symmetry_ops(s);
        const auto orbits = compute_orbits(s, ops);
        const auto want = brute_orbits(s, ops);
        CHECK(orbits.representative_of == want);
        CHECK(std::accumulate(orbits.multiplicity.begin(), orbits.multiplicity.end(), 0) ==
              static_cast<int>(s.size()));
        for (size_t i = 0; i < s.size(); ++i) {
            const int rep = orbits.representative_of[i];
            Vec3 d = orbits.op_to_rep[i].apply(s.site(i).frac) - s.site(static_cast<size_t>(rep)).frac;
            d = d.array() - d.array().round();
            CHECK(d.cwiseAbs().maxCoeff() < 1e-6);
            if (static_cast<int>(i) == rep)
                CHECK(orbits.op_to_rep[i].is_identity());
        }
        // Every generating op of the construction is found.
        for (const auto &op : input.ops)
            CHECK(contains(ops, op));
    }
}

TEST_CASE("size bound n_unit >= n_asu >= n_unit / 48") {
    std::mt19937_64 rng(48);
    for (int t = 0; t < 60; ++t) {
        const auto s = fixtures::random_symmetric(rng).structure;
        const auto orbits = compute_orbits(s, find_symmetry_ops(s));
        const double n = static_cast<double>(s.size());
        CHECK(static_cast<double>(orbits.num_orbits()) <= n);
        CHECK(static_cast<double>(orbits.num_orbits()) >= n / 48.0);
    }
}

TEST_CASE("orbit partition is invariant under relabeling and rotation") {
    std::mt19937_64 rng(55);
    for (int t = 0; t < 15; ++t) {
        const auto s = fixtures::random_symmetric(rng).structure;
        const auto base = compute_orbits(s, find_symmetry_ops(s));

        std::vector<size_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<AtomSite> sites;
        for (size_t i = 0; i < s.size(); ++i) {
            auto site = s.site(perm[i]);
            site.site_index = static_cast<int>(i);
            sites.push_back(site);
        }
        const CrystalStructure shuffled(s.lattice(), sites);
        const auto other = compute_orbits(shuffled, find_symmetry_ops(shuffled));
        for (size_t i = 0; i < s.size(); ++i)
            for (size_t j = 0; j < s.size(); ++j)
                CHECK((base.representative_of[perm[i]] == base.representative_of[perm[j]]) ==
                      (other.representative_of[i] == other.representative_of[j]));

        const auto rotated = rotate(s, fixtures::random_rotation(rng));
        CHECK(compute_orbits(rotated, find_symmetry_ops(rotated)).representative_of ==
              base.representative_of);
    }
}

TEST_CASE("inconsistent ops are rejected") {
    const auto nacl = fixtures::rocksalt();
    CHECK_THROWS_AS(site_permutation(nacl, parse_xyz_op("x+1/2,y,z")), Error);
    CHECK_THROWS_AS(compute_orbits(nacl, {SymmetryOp::identity(), parse_xyz_op("x+1/2,y,z")}),
                    Error);
}

TEST_CASE("reduced basis is unimodular and short") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 20; ++t) {
        const auto s = fixtures::random_structure(rng, 1);
        // Skew the cell with a random unimodular transform.
        IMat3 u;
        u << 1, static_cast<int>(rng() % 3), 0, 0, 1, static_cast<int>(rng() % 3), 0, 0, 1;
        const Lattice skewed(u.cast<double>() * s.lattice().basis());
        const auto m = reduce_basis(skewed);
        REQUIRE(m);
        CHECK(std::abs(m->cast<double>().determinant() - 1.0) < 1e-12);
        const Mat3 reduced = m->cast<double>() * skewed.basis();
        double sum_reduced = 0.0, sum_skewed = 0.0;
        for (int k = 0; k < 3; ++k) {
            sum_reduced += reduced.row(k).norm();
            sum_skewed += skewed.basis().row(k).norm();
        }
        CHECK(sum_reduced <= sum_skewed + 1e-9);
    }
}

TEST_CASE("skewed input basis still finds the symmetry") {
    const auto nacl = fixtures::rocksalt();
    IMat3 u;
    u << 1, 1, 0, 0, 1, 2, 0, 0, 1;
    const Mat3 ud = u.cast<double>();
    const Lattice skewed(ud * nacl.lattice().basis());
    std::vector<AtomSite> sites;
    for (const auto &site : nacl.sites()) {
        auto moved = site;
        moved.frac = ud.transpose().inverse() * site.frac;
        sites.push_back(moved);
    }
    const CrystalStructure s(skewed, sites);
    CHECK(find_symmetry_ops(s).size() == 192);
}
