#include <crystgraph/error.hpp>
#include <crystgraph/neighbors.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>

namespace crystgraph {

void NeighborConfig::validate() const {
    if (method == NeighborMethod::knn && k < 1)
        throw Error(ErrorKind::InvalidConfig, "knn requires k >= 1");
    if (method == NeighborMethod::radius && !(r > 0.0))
        throw Error(ErrorKind::InvalidConfig, "radius requires r > 0");
    if (!(tie_epsilon >= 0.0))
        throw Error(ErrorKind::InvalidConfig, "tie_epsilon must be >= 0");
}

namespace {

bool offset_less(const IVec3 &a, const IVec3 &b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

bool image_less(const NeighborImage &a, const NeighborImage &b) {
    if (a.distance != b.distance)
        return a.distance < b.distance;
    if (a.src != b.src)
        return a.src < b.src;
    return offset_less(a.offset, b.offset);
}

PeriodicEdge to_edge(const NeighborImage &img, int dst) {
    PeriodicEdge e;
    e.src = img.src;
    e.dst = dst;
    e.offset = img.offset;
    e.vector = img.vector;
    e.distance = img.distance;
    return e;
}

void append_edges(std::vector<PeriodicEdge> &edges, const std::vector<NeighborImage> &list,
                  int dst) {
    for (const auto &img : list)
        edges.push_back(to_edge(img, dst));
}

struct Image {
    int site;
    IVec3 offset;
    Vec3 cart;
};

} // namespace

bool edge_less(const PeriodicEdge &a, const PeriodicEdge &b) {
    if (a.dst != b.dst)
        return a.dst < b.dst;
    if (a.distance != b.distance)
        return a.distance < b.distance;
    if (a.src != b.src)
        return a.src < b.src;
    return offset_less(a.offset, b.offset);
}

PeriodicEdge make_edge(const CrystalStructure &structure, int src, int dst,
                       const IVec3 &offset) {
    PeriodicEdge e;
    e.src = src;
    e.dst = dst;
    e.offset = offset;
    const Vec3 delta = (structure.site(static_cast<size_t>(src)).frac -
                        structure.site(static_cast<size_t>(dst)).frac) +
                       offset.cast<double>();
    e.vector = structure.lattice().to_cart(delta);
    e.distance = e.vector.norm();
    return e;
}

std::vector<std::vector<NeighborImage>> images_within(const CrystalStructure &structure,
                                                      double cutoff,
                                                      const std::vector<int> &dsts) {
    std::vector<std::vector<NeighborImage>> out(dsts.size());
    if (structure.empty() || dsts.empty() || !(cutoff > 0.0))
        return out;
    const Lattice &lattice = structure.lattice();
    const Vec3 &h = lattice.plane_spacings();
    // Fractional reach of the cutoff along each axis.
    const Vec3 reach = Vec3::Constant(cutoff).cwiseQuotient(h);
    // Offsets whose shifted cell overlaps [-reach, 1 + reach] on each axis.
    IVec3 nmin, nmax;
    for (int k = 0; k < 3; ++k) {
        nmin[k] = -static_cast<int>(std::ceil(reach[k] + 1e-9));
        nmax[k] = static_cast<int>(std::floor(1.0 + reach[k] + 1e-9));
    }

    // Every image whose fractional position lies within `reach` of the
    // home cell, binned on a flat grid of cells at least as wide as the cutoff.
    std::vector<Image> images;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int a = nmin[0]; a <= nmax[0]; ++a) {
        for (int b = nmin[1]; b <= nmax[1]; ++b) {
            for (int c = nmin[2]; c <= nmax[2]; ++c) {
                const IVec3 n(a, b, c);
                for (size_t j = 0; j < structure.size(); ++j) {
                    const Vec3 g = structure.site(j).frac + n.cast<double>();
                    bool keep = true;
                    for (int k = 0; k < 3 && keep; ++k)
                        keep = g[k] >= -reach[k] - 1e-9 && g[k] <= 1.0 + reach[k] + 1e-9;
                    if (!keep)
                        continue;
                    const Vec3 p = lattice.to_cart(g);
                    lo = lo.cwiseMin(p);
                    hi = hi.cwiseMax(p);
                    images.push_back({static_cast<int>(j), n, p});
                }
            }
        }
    }

    // Cells of half the cutoff; a +-2 stencil covers the cutoff sphere.
    constexpr long kSpan = 2;
    const double bin = (cutoff * (1.0 + 1e-9) + 1e-12) / static_cast<double>(kSpan);
    std::array<long, 3> dims{};
    for (int k = 0; k < 3; ++k)
        dims[static_cast<size_t>(k)] = static_cast<long>(std::floor((hi[k] - lo[k]) / bin)) + 1;
    const auto cell_of = [&](const Vec3 &p, int k) {
        const long c = static_cast<long>(std::floor((p[k] - lo[k]) / bin));
        return std::clamp(c, 0L, dims[static_cast<size_t>(k)] - 1);
    };
    const auto flat = [&](long x, long y, long z) { return (x * dims[1] + y) * dims[2] + z; };
    // CSR layout: images of cell c are sorted[start[c] .. start[c + 1]).
    std::vector<size_t> start(static_cast<size_t>(dims[0] * dims[1] * dims[2]) + 1, 0);
    std::vector<size_t> cell(images.size());
    for (size_t i = 0; i < images.size(); ++i) {
        const auto &p = images[i].cart;
        cell[i] = static_cast<size_t>(flat(cell_of(p, 0), cell_of(p, 1), cell_of(p, 2)));
        ++start[cell[i] + 1];
    }
    for (size_t c = 1; c < start.size(); ++c)
        start[c] += start[c - 1];
    std::vector<Image> sorted(images.size());
    {
        auto fill = start;
        for (size_t i = 0; i < images.size(); ++i)
            sorted[fill[cell[i]]++] = images[i];
    }

    const double prefilter = (cutoff + 1e-9) * (1.0 + 1e-9);
    const auto &sites = structure.sites();
    for (size_t q = 0; q < dsts.size(); ++q) {
        const int d = dsts[q];
        const Vec3 home = structure.cart(static_cast<size_t>(d));
        const Vec3 &home_frac = sites[static_cast<size_t>(d)].frac;
        const long cx = cell_of(home, 0), cy = cell_of(home, 1), cz = cell_of(home, 2);
        auto &list = out[q];
        for (long x = std::max(cx - kSpan, 0L); x <= std::min(cx + kSpan, dims[0] - 1); ++x) {
            for (long y = std::max(cy - kSpan, 0L); y <= std::min(cy + kSpan, dims[1] - 1); ++y) {
                const long z0 = std::max(cz - kSpan, 0L), z1 = std::min(cz + kSpan, dims[2] - 1);
                // Cells z0..z1 are contiguous in the CSR layout.
                const auto first = start[static_cast<size_t>(flat(x, y, z0))];
                const auto last = start[static_cast<size_t>(flat(x, y, z1)) + 1];
                for (size_t o = first; o < last; ++o) {
                    const Image &img = sorted[o];
                    if (img.site == d && img.offset.isZero())
                        continue;
                    if ((img.cart - home).squaredNorm() > prefilter * prefilter)
                        continue;
                    // Same arithmetic as make_edge.
                    const Vec3 delta = (sites[static_cast<size_t>(img.site)].frac - home_frac) +
                                       img.offset.cast<double>();
                    const Vec3 v = lattice.to_cart(delta);
                    const double dist = v.norm();
                    if (dist <= cutoff)
                        list.push_back({img.site, img.offset, v, dist});
                }
            }
        }
        std::sort(list.begin(), list.end(), image_less);
    }
    return out;
}

std::vector<PeriodicEdge> knn_edges(const CrystalStructure &structure, int k,
                                    double tie_epsilon) {
    if (structure.empty())
        throw Error(ErrorKind::EmptyStructure, "knn_edges on empty structure");
    NeighborConfig{NeighborMethod::knn, k, 1.0, tie_epsilon}.validate();

    const double n = static_cast<double>(structure.size());
    // Radius of a sphere expected to hold k atoms at the average density.
    double cutoff = std::cbrt(3.0 * k * structure.lattice().volume() /
                              (4.0 * std::numbers::pi * n)) *
                        1.3 +
                    tie_epsilon;
    std::vector<int> pending(structure.size());
    for (size_t i = 0; i < pending.size(); ++i)
        pending[i] = static_cast<int>(i);

    std::vector<std::vector<NeighborImage>> per_dst(structure.size());
    while (!pending.empty()) {
        auto found = images_within(structure, cutoff, pending);
        std::vector<int> retry;
        for (size_t q = 0; q < pending.size(); ++q) {
            auto &list = found[q];
            const auto ku = static_cast<size_t>(k);
            // The tie group is complete only if the cutoff reaches past it.
            if (list.size() < ku || list[ku - 1].distance + tie_epsilon >= cutoff) {
                retry.push_back(pending[q]);
                continue;
            }
            const double limit = list[ku - 1].distance + tie_epsilon;
            size_t keep = ku;
            while (keep < list.size() && list[keep].distance <= limit)
                ++keep;
            list.resize(keep);
            per_dst[static_cast<size_t>(pending[q])] = std::move(list);
        }
        pending = std::move(retry);
        cutoff *= 1.5;
    }

    size_t total = 0;
    for (const auto &list : per_dst)
        total += list.size();
    std::vector<PeriodicEdge> edges;
    edges.reserve(total);
    for (size_t d = 0; d < per_dst.size(); ++d)
        append_edges(edges, per_dst[d], static_cast<int>(d));
    return edges;
}

std::vector<PeriodicEdge> radius_edges(const CrystalStructure &structure, double r) {
    NeighborConfig{NeighborMethod::radius, 1, r, 0.0}.validate();
    std::vector<int> all(structure.size());
    for (size_t i = 0; i < all.size(); ++i)
        all[i] = static_cast<int>(i);
    const auto found = images_within(structure, r, all);
    size_t total = 0;
    for (const auto &list : found)
        total += list.size();
    std::vector<PeriodicEdge> edges;
    edges.reserve(total);
    for (size_t d = 0; d < found.size(); ++d)
        append_edges(edges, found[d], static_cast<int>(d));
    return edges;
}

std::vector<PeriodicEdge> symmetrize_edges(std::vector<PeriodicEdge> edges) {
    struct Key {
        int src, dst, a, b, c;
        auto operator<=>(const Key &) const = default;
    };
    std::vector<Key> present;
    present.reserve(edges.size());
    for (const auto &e : edges)
        present.push_back({e.src, e.dst, e.offset[0], e.offset[1], e.offset[2]});
    std::sort(present.begin(), present.end());
    const size_t original = edges.size();
    for (size_t i = 0; i < original; ++i) {
        const auto &e = edges[i];
        const Key rev{e.dst, e.src, -e.offset[0], -e.offset[1], -e.offset[2]};
        if (std::binary_search(present.begin(), present.end(), rev))
            continue;
        PeriodicEdge r = e;
        std::swap(r.src, r.dst);
        r.offset = -e.offset;
        r.vector = -e.vector;
        edges.push_back(std::move(r));
    }
    std::sort(edges.begin(), edges.end(), edge_less);
    return edges;
}

std::vector<PeriodicEdge> neighbor_edges(const CrystalStructure &structure,
                                         const NeighborConfig &config) {
    config.validate();
    std::vector<PeriodicEdge> edges = config.method == NeighborMethod::knn
                                          ? knn_edges(structure, config.k, config.tie_epsilon)
                                          : radius_edges(structure, config.r);
    if (config.symmetrize)
        edges = symmetrize_edges(std::move(edges));
    return edges;
}

} // namespace crystgraph
