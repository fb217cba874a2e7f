#include "fixtures.hpp"

#include <crystgraph/error.hpp>
#include <crystgraph/io.hpp>
#include <crystgraph/pipeline.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace fixtures {

std::filesystem::path data_dir() { return CRYSTGRAPH_DATA_DIR; }

std::vector<CifStructure> load_corpus() {
    std::vector<CifStructure> out;
    for (const auto &p : collect_inputs({data_dir() / "corpus"}))
        out.push_back(load_structure(p));
    return out;
}

CifStructure load_corpus_file(const std::string &stem) {
    return load_structure(data_dir() / "corpus" / (stem + ".cif"));
}

CrystalStructure simple_cubic(double a, int z) {
    return CrystalStructure(Lattice::cubic(a), {{z, Vec3::Zero(), 0}}, "sc");
}

CrystalStructure fcc(double a, int z) {
    std::vector<AtomSite> sites;
    for (const Vec3 &f : {Vec3(0, 0, 0), Vec3(0, 0.5, 0.5), Vec3(0.5, 0, 0.5), Vec3(0.5, 0.5, 0)})
        sites.push_back({z, f, static_cast<int>(sites.size())});
    return CrystalStructure(Lattice::cubic(a), sites, "fcc");
}

CrystalStructure bcc(double a, int z) {
    return CrystalStructure(Lattice::cubic(a), {{z, Vec3::Zero(), 0}, {z, Vec3::Constant(0.5), 1}},
                            "bcc");
}

CrystalStructure rocksalt(double a) {
    std::vector<AtomSite> sites;
    const Vec3 fc[] = {Vec3(0, 0, 0), Vec3(0, 0.5, 0.5), Vec3(0.5, 0, 0.5), Vec3(0.5, 0.5, 0)};
    for (const auto &f : fc)
        sites.push_back({11, f, static_cast<int>(sites.size())});
    for (const auto &f : fc)
        sites.push_back({17, wrap_frac(f + Vec3(0.5, 0, 0)), static_cast<int>(sites.size())});
    return CrystalStructure(Lattice::cubic(a), sites, "NaCl");
}

namespace {

double min_image_cart(const Lattice &lattice, const Vec3 &df) {
    double best = 1e300;
    const Vec3 d = df.array() - df.array().round();
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                best = std::min(best, lattice.to_cart(d + Vec3(a, b, c)).norm());
    return best;
}

} // namespace

CrystalStructure random_structure(std::mt19937_64 &rng, int n, double min_sep) {
    std::uniform_real_distribution<double> len(3.0, 6.0), ang(70.0, 110.0), u(0.0, 1.0);
    const int species[] = {1, 3, 8, 11, 14, 26, 29, 47};
    for (;;) {
        Lattice lattice;
        try {
            lattice = Lattice::from_parameters(len(rng), len(rng), len(rng), ang(rng), ang(rng),
                                               ang(rng));
        } catch (const Error &) {
            continue;
        }
        if (lattice.min_plane_spacing() < 2.0)
            continue;
        std::vector<AtomSite> sites;
        int attempts = 0;
        while (static_cast<int>(sites.size()) < n && attempts < 1000) {
            ++attempts;
            const Vec3 f(u(rng), u(rng), u(rng));
            bool ok = true;
            for (const auto &s : sites)
                ok = ok && min_image_cart(lattice, f - s.frac) >= min_sep;
            if (ok)
                sites.push_back({species[rng() % 8], f, static_cast<int>(sites.size())});
        }
        if (static_cast<int>(sites.size()) == n)
            return CrystalStructure(lattice, sites, "random");
    }
}

std::vector<SymmetryOp> group_closure(const std::vector<std::string> &generators) {
    std::vector<SymmetryOp> gens;
    for (const auto &g : generators)
        gens.push_back(parse_xyz_op(g));
    std::vector<SymmetryOp> group{SymmetryOp::identity()};
    for (size_t i = 0; i < group.size(); ++i) {
        for (const auto &g : gens) {
            const auto c = g.compose(group[i]);
            bool seen = false;
            for (const auto &h : group)
                seen = seen || h.equivalent(c, 1e-9);
            if (!seen)
                group.push_back(c);
        }
    }
    return group;
}

namespace {

struct GroupSpec {
    std::vector<std::string> generators;
    char lattice; // c cubic, t tetragonal, h hexagonal, o orthorhombic, m monoclinic
};

const std::vector<GroupSpec> &group_specs() {
    static const std::vector<GroupSpec> specs = {
        {{"-y,x,z", "z,x,y", "-x,-y,-z", "y,x,z"}, 'c'},     // m-3m
        {{"z,x,y", "-x,-y,z", "-x,-y,-z"}, 'c'},             // m-3
        {{"y,-x,-z", "z,x,y", "y,x,z"}, 'c'},                // -43m
        {{"-y,x,z", "-x,-y,-z", "y,x,-z"}, 't'},             // 4/mmm
        {{"-y,x,z"}, 't'},                                   // 4
        {{"y,-x,-z", "x,-y,-z"}, 't'},                       // -42m
        {{"x-y,x,z", "-x,-y,-z", "-y,-x,z"}, 'h'},           // 6/mmm
        {{"-y,x-y,z", "-x,-y,-z"}, 'h'},                     // -3
        {{"-y,x-y,z", "y,x,-z"}, 'h'},                       // 312
        {{"-x,-y,z", "x,-y,-z", "-x,-y,-z"}, 'o'},           // mmm
        {{"-x,-y,z", "-x,y,z"}, 'o'},                        // mm2
        {{"-x,y,-z", "-x,-y,-z"}, 'm'},                      // 2/m
        {{"-x,-y,-z"}, 'm'},                                 // -1
        {{"-x+1/2,-y,z+1/2", "-x,y+1/2,-z+1/2"}, 'o'},       // P212121
        {{"-y,x,z+1/4", "-x,-y,z+1/2"}, 't'},                // P41
        {{"-x,-y,z", "x+1/2,y+1/2,z+1/2"}, 'o'},             // I-centred 2
    };
    return specs;
}

Lattice lattice_for(char kind, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> len(3.5, 6.5), mono(95.0, 115.0);
    const double a = len(rng), b = len(rng), c = len(rng);
    switch (kind) {
    case 'c': return Lattice::cubic(a);
    case 't': return Lattice::from_parameters(a, a, c, 90, 90, 90);
    case 'h': return Lattice::from_parameters(a, a, c, 90, 90, 120);
    case 'o': return Lattice::from_parameters(a, b, c, 90, 90, 90);
    default: return Lattice::from_parameters(a, b, c, 90, mono(rng), 90);
    }
}

} // namespace

CifStructure random_symmetric(std::mt19937_64 &rng) {
    const auto &specs = group_specs();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int species[] = {3, 8, 12, 14, 20, 26, 30, 56};
    for (;;) {
        const auto &spec = specs[rng() % specs.size()];
        const auto ops = group_closure(spec.generators);
        const Lattice lattice = lattice_for(spec.lattice, rng);
        const int seeds = 1 + static_cast<int>(rng() % 3);
        std::vector<AtomSite> sites;
        bool ok = true;
        for (int s = 0; s < seeds && ok; ++s) {
            // Special positions half of the time: snap coordinates to 0 or 1/2.
            Vec3 p(u(rng), u(rng), u(rng));
            for (int k = 0; k < 3; ++k)
                if (rng() % 4 == 0)
                    p[k] = (rng() % 2) * 0.5;
            const int z = species[rng() % 8];
            std::vector<AtomSite> orbit;
            for (const auto &op : ops) {
                const Vec3 q = wrap_frac(op.apply(p));
                bool dup = false;
                for (const auto &o : orbit)
                    dup = dup || min_image_cart(lattice, q - o.frac) < 1e-6;
                if (!dup)
                    orbit.push_back({z, q, 0});
            }
            for (const auto &o : orbit) {
                for (const auto &e : sites)
                    ok = ok && min_image_cart(lattice, o.frac - e.frac) > 0.9;
                for (const auto &e : orbit)
                    ok = ok && (&e == &o || min_image_cart(lattice, o.frac - e.frac) > 0.9);
            }
            for (auto &o : orbit) {
                o.site_index = static_cast<int>(sites.size());
                sites.push_back(o);
            }
        }
        if (!ok || sites.size() > 48)
            continue;
        return CifStructure{CrystalStructure(lattice, sites, "symmetric"), ops};
    }
}

std::vector<BruteEdge> brute_images(const CrystalStructure &s, int range) {
    std::vector<BruteEdge> out;
    for (size_t d = 0; d < s.size(); ++d)
        for (size_t src = 0; src < s.size(); ++src)
            for (int a = -range; a <= range; ++a)
                for (int b = -range; b <= range; ++b)
                    for (int c = -range; c <= range; ++c) {
                        const IVec3 off(a, b, c);
                        if (src == d && off.isZero())
                            continue;
                        const double dist = (s.image(src, off) - s.cart(d)).norm();
                        out.push_back({static_cast<int>(src), static_cast<int>(d), off, dist});
                    }
    return out;
}

std::vector<BruteEdge> brute_radius(const CrystalStructure &s, double r, int range) {
    auto all = brute_images(s, range);
    std::erase_if(all, [&](const BruteEdge &e) { return e.distance > r; });
    return all;
}

std::vector<BruteEdge> brute_knn(const CrystalStructure &s, int k, double eps, int range) {
    const auto all = brute_images(s, range);
    std::vector<BruteEdge> out;
    for (size_t d = 0; d < s.size(); ++d) {
        std::vector<double> dists;
        for (const auto &e : all)
            if (e.dst == static_cast<int>(d))
                dists.push_back(e.distance);
        std::sort(dists.begin(), dists.end());
        const double kth = dists[static_cast<size_t>(k - 1)];
        for (const auto &e : all)
            if (e.dst == static_cast<int>(d) && e.distance <= kth + eps)
                out.push_back(e);
    }
    return out;
}

Mat3 random_rotation(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q.toRotationMatrix();
}

double rel(double a, double b) { return std::abs(a - b) / (std::abs(a) + 1e-12); }

} // namespace fixtures
