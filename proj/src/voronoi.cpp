#include <crystgraph/error.hpp>
#include <crystgraph/voronoi.hpp>

#include <algorithm>
#include <cmath>

namespace crystgraph {

namespace {

constexpr double kPlaneTol = 1e-10;  // Å, side-of-plane classification
constexpr double kVertexTol = 1e-9;  // Å, vertex dedup
constexpr int kMaxExpansions = 32;

struct Face {
    std::vector<Vec3> polygon; // local coordinates, atom at origin
    Vec3 normal;
    double height; // plane: normal . x = height
    int neighbor;  // -1 for the bounding box
    IVec3 offset;
    double distance; // distance to the neighbor image
};

void push_unique(std::vector<Vec3> &points, const Vec3 &p) {
    for (const auto &q : points)
        if ((q - p).norm() <= kVertexTol)
            return;
    points.push_back(p);
}

// Orders coplanar points of a convex polygon counter-clockwise about `normal`.
void order_polygon(std::vector<Vec3> &points, const Vec3 &normal) {
    Vec3 center = Vec3::Zero();
    for (const auto &p : points)
        center += p;
    center /= static_cast<double>(points.size());
    const Vec3 u = (points[0] - center).normalized();
    const Vec3 w = normal.cross(u);
    std::vector<std::pair<double, Vec3>> keyed;
    keyed.reserve(points.size());
    for (const auto &p : points) {
        const Vec3 d = p - center;
        keyed.emplace_back(std::atan2(d.dot(w), d.dot(u)), p);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (size_t i = 0; i < points.size(); ++i)
        points[i] = keyed[i].second;
}

class Polyhedron {
public:
    explicit Polyhedron(double half_width) {
        const double h = half_width;
        for (int axis = 0; axis < 3; ++axis) {
            for (int sign : {1, -1}) {
                Vec3 n = Vec3::Zero();
                n[axis] = sign;
                const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                std::vector<Vec3> poly;
                for (auto [su, sv] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
                    Vec3 p = n * h;
                    p[u] = su * h;
                    p[v] = sv * h;
                    poly.push_back(p);
                }
                order_polygon(poly, n);
                m_faces.push_back({std::move(poly), n, h, -1, IVec3::Zero(), 0.0});
            }
        }
    }

    double circumradius() const {
        double r = 0.0;
        for (const auto &f : m_faces)
            for (const auto &p : f.polygon)
                r = std::max(r, p.norm());
        return r;
    }

    // Keeps the half-space normal . x <= height; returns true if anything was cut.
    bool cut(const Vec3 &normal, double height, int neighbor, const IVec3 &offset,
             double distance) {
        bool outside = false;
        for (const auto &f : m_faces) {
            for (const auto &p : f.polygon) {
                if (normal.dot(p) - height > kPlaneTol) {
                    outside = true;
                    break;
                }
            }
            if (outside)
                break;
        }
        if (!outside)
            return false;

        std::vector<Vec3> section;
        std::vector<Face> kept;
        kept.reserve(m_faces.size() + 1);
        for (auto &f : m_faces) {
            std::vector<Vec3> clipped;
            const size_t n = f.polygon.size();
            for (size_t k = 0; k < n; ++k) {
                const Vec3 &p = f.polygon[k];
                const Vec3 &q = f.polygon[(k + 1) % n];
                const double sp = normal.dot(p) - height;
                const double sq = normal.dot(q) - height;
                if (sp <= kPlaneTol) {
                    clipped.push_back(p);
                    if (std::abs(sp) <= kPlaneTol)
                        push_unique(section, p);
                }
                if ((sp < -kPlaneTol && sq > kPlaneTol) || (sp > kPlaneTol && sq < -kPlaneTol)) {
                    const Vec3 x = p + (q - p) * (sp / (sp - sq));
                    clipped.push_back(x);
                    push_unique(section, x);
                }
            }
            // Collapse near-duplicate consecutive vertices.
            std::vector<Vec3> compact;
            for (const auto &p : clipped)
                if (compact.empty() || (compact.back() - p).norm() > kVertexTol)
                    compact.push_back(p);
            while (compact.size() > 1 && (compact.front() - compact.back()).norm() <= kVertexTol)
                compact.pop_back();
            if (compact.size() >= 3) {
                f.polygon = std::move(compact);
                kept.push_back(std::move(f));
            }
        }
        if (section.size() >= 3) {
            order_polygon(section, normal);
            kept.push_back({std::move(section), normal, height, neighbor, offset, distance});
        }
        m_faces = std::move(kept);
        return true;
    }

    const std::vector<Face> &faces() const { return m_faces; }

private:
    std::vector<Face> m_faces;
};

Vec3 polygon_centroid(const std::vector<Vec3> &poly) {
    // Area-weighted centroid via a fan about the first vertex.
    Vec3 acc = Vec3::Zero();
    double total = 0.0;
    for (size_t k = 1; k + 1 < poly.size(); ++k) {
        const double a = 0.5 * (poly[k] - poly[0]).cross(poly[k + 1] - poly[0]).norm();
        acc += a * (poly[0] + poly[k] + poly[k + 1]) / 3.0;
        total += a;
    }
    return total > 0.0 ? Vec3(acc / total) : poly[0];
}

} // namespace

double polygon_area(const std::vector<Vec3> &polygon) {
    if (polygon.size() < 3)
        return 0.0;
    Vec3 sum = Vec3::Zero();
    for (size_t k = 0; k < polygon.size(); ++k)
        sum += polygon[k].cross(polygon[(k + 1) % polygon.size()]);
    return 0.5 * sum.norm();
}

VoronoiCell voronoi_cell(const CrystalStructure &structure, int site, double area_epsilon) {
    const Lattice &lattice = structure.lattice();
    const Vec3 lengths = lattice.basis().rowwise().norm();
    // The cell lies within half the summed lattice vector lengths of its atom.
    Polyhedron poly(lengths.sum());

    double cutoff = 2.0 * std::cbrt(lattice.volume() / static_cast<double>(structure.size()));
    double processed = 0.0;
    bool closed = false;
    for (int iter = 0; iter < kMaxExpansions && !closed; ++iter) {
        const auto found = images_within(structure, cutoff, {site});
        for (const auto &e : found[0]) {
            if (e.distance <= processed)
                continue;
            if (e.distance * 0.5 > poly.circumradius() + kPlaneTol)
                break;
            const Vec3 normal = e.vector / e.distance;
            poly.cut(normal, 0.5 * e.distance, e.src, e.offset, e.distance);
        }
        processed = cutoff;
        // Planes beyond the cutoff sit farther than cutoff / 2 from the atom.
        const double radius = poly.circumradius();
        if (2.0 * radius < cutoff - kPlaneTol)
            closed = true;
        else
            cutoff = std::max(cutoff * 1.5, 2.0 * radius * (1.0 + 1e-6) + 1e-9);
    }
    const bool bounded = std::none_of(poly.faces().begin(), poly.faces().end(),
                                      [](const Face &f) { return f.neighbor < 0; });
    if (!closed || !bounded)
        throw Error(ErrorKind::DegenerateCell, "site " + std::to_string(site));

    const Vec3 origin = structure.cart(static_cast<size_t>(site));
    VoronoiCell cell;
    cell.owner = site;
    std::vector<Vec3> local_vertices;
    for (const auto &f : poly.faces()) {
        // Pyramid volume over every face, including dropped slivers.
        const double area = polygon_area(f.polygon);
        cell.volume += area * f.height / 3.0;
        for (const auto &p : f.polygon)
            push_unique(local_vertices, p);
        if (area <= area_epsilon)
            continue;
        cell.faces.push_back({f.neighbor, f.offset, area, origin + polygon_centroid(f.polygon)});
    }
    // Order faces like edges: neighbor distance, neighbor index, offset.
    std::vector<std::pair<double, VoronoiFace>> keyed;
    for (const auto &face : cell.faces) {
        const auto e = make_edge(structure, face.neighbor, site, face.offset);
        keyed.emplace_back(e.distance, face);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) {
        if (a.first != b.first)
            return a.first < b.first;
        if (a.second.neighbor != b.second.neighbor)
            return a.second.neighbor < b.second.neighbor;
        return std::lexicographical_compare(a.second.offset.data(), a.second.offset.data() + 3,
                                            b.second.offset.data(), b.second.offset.data() + 3);
    });
    for (size_t i = 0; i < keyed.size(); ++i)
        cell.faces[i] = keyed[i].second;
    for (const auto &p : local_vertices)
        cell.vertices.push_back(origin + p);
    if (!(cell.volume > 0.0))
        throw Error(ErrorKind::DegenerateCell, "site " + std::to_string(site) + " has no volume");
    return cell;
}

std::vector<VoronoiCell> voronoi_cells(const CrystalStructure &structure, double area_epsilon) {
    if (structure.empty())
        throw Error(ErrorKind::EmptyStructure, "voronoi_cells on empty structure");
    std::vector<VoronoiCell> cells;
    cells.reserve(structure.size());
    for (size_t i = 0; i < structure.size(); ++i)
        cells.push_back(voronoi_cell(structure, static_cast<int>(i), area_epsilon));
    return cells;
}

std::vector<PeriodicEdge> voronoi_edges(const CrystalStructure &structure,
                                        bool include_ridge_area, double area_epsilon) {
    std::vector<PeriodicEdge> edges;
    for (const auto &cell : voronoi_cells(structure, area_epsilon)) {
        for (const auto &face : cell.faces) {
            PeriodicEdge e = make_edge(structure, face.neighbor, cell.owner, face.offset);
            if (include_ridge_area)
                e.ridge_area = face.area;
            edges.push_back(std::move(e));
        }
    }
    std::sort(edges.begin(), edges.end(), edge_less);
    return edges;
}

} // namespace crystgraph
