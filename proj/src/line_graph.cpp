#include <crystgraph/error.hpp>
#include <crystgraph/line_graph.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crystgraph {

std::string_view to_string(LineGraphVariant variant) {
    return variant == LineGraphVariant::path ? "path" : "destination";
}

LineGraphVariant line_graph_variant_from_string(std::string_view name) {
    if (name == "path")
        return LineGraphVariant::path;
    if (name == "destination")
        return LineGraphVariant::destination;
    throw Error(ErrorKind::InvalidConfig, "unknown line graph variant '" + std::string(name) + "'");
}

double angle_between(const Vec3 &v1, const Vec3 &v2) {
    const double n1 = v1.norm(), n2 = v2.norm();
    if (!(n1 > 0.0) || !(n2 > 0.0))
        throw Error(ErrorKind::ZeroVector, "angle_between needs non-zero vectors");
    // atan2 keeps full precision near 0 and pi, where acos does not.
    return std::atan2(v1.cross(v2).norm(), v1.dot(v2));
}

namespace {

// Incoming edge indices per node, in edge order.
std::vector<std::vector<int>> incoming(size_t num_nodes, const std::vector<LineGraphEdge> &edges) {
    std::vector<std::vector<int>> in(num_nodes);
    for (size_t i = 0; i < edges.size(); ++i)
        in[static_cast<size_t>(edges[i].b)].push_back(static_cast<int>(i));
    return in;
}

} // namespace

LineGraph line_graph(const CrystalGraph &base, LineGraphVariant variant, bool keep_backtrack) {
    for (const auto &e : base.edges)
        if (!e.vector.allFinite() || e.vector.isZero(0.0))
            throw Error(ErrorKind::MissingVectors, "line graph needs non-zero edge vectors");

    LineGraph lg;
    lg.variant = variant;
    lg.order = 1;
    lg.num_nodes = base.num_edges();

    std::vector<std::vector<int>> in(base.num_nodes());
    for (size_t i = 0; i < base.edges.size(); ++i)
        in[static_cast<size_t>(base.edges[i].dst)].push_back(static_cast<int>(i));

    if (variant == LineGraphVariant::destination) {
        for (const auto &group : in) {
            for (int p : group) {
                for (int q : group) {
                    if (p == q)
                        continue;
                    lg.edges.push_back({p, q});
                    lg.angles.push_back(angle_between(base.edges[static_cast<size_t>(p)].vector,
                                                      base.edges[static_cast<size_t>(q)].vector));
                }
            }
        }
        return lg;
    }

    // Path: e_in (i -> s) feeds e_out (s -> d). The outgoing edge's vector is
    // rotated into the frame of its source node (identity for unit graphs).
    for (size_t q = 0; q < base.edges.size(); ++q) {
        const auto &out = base.edges[q];
        const Vec3 out_vec = base.src_frame(q) * out.vector;
        for (int p : in[static_cast<size_t>(out.src)]) {
            const auto &e_in = base.edges[static_cast<size_t>(p)];
            const bool backtrack =
                e_in.src == out.dst && (e_in.vector + out_vec).norm() <= kBacktrackTolerance;
            if (backtrack && !keep_backtrack)
                continue;
            lg.edges.push_back({p, static_cast<int>(q)});
            lg.angles.push_back(angle_between(e_in.vector, out_vec));
        }
    }
    return lg;
}

LineGraph line_graph_order2(const LineGraph &lg, bool keep_backtrack) {
    LineGraph out;
    out.variant = lg.variant;
    out.order = lg.order + 1;
    out.num_nodes = lg.num_edges();
    const auto in = incoming(lg.num_nodes, lg.edges);

    if (lg.variant == LineGraphVariant::destination) {
        for (const auto &group : in)
            for (int p : group)
                for (int q : group)
                    if (p != q)
                        out.edges.push_back({p, q});
        return out;
    }
    for (size_t q = 0; q < lg.edges.size(); ++q) {
        const auto &second = lg.edges[q];
        for (int p : in[static_cast<size_t>(second.a)]) {
            const auto &first = lg.edges[static_cast<size_t>(p)];
            if (!keep_backtrack && first.a == second.b)
                continue;
            out.edges.push_back({p, static_cast<int>(q)});
        }
    }
    return out;
}

void add_line_graph_json(nlohmann::ordered_json &record, const LineGraph &lg) {
    auto angles = nlohmann::ordered_json::array();
    for (size_t i = 0; i < lg.edges.size(); ++i) {
        nlohmann::ordered_json a;
        a["a"] = lg.edges[i].a;
        a["b"] = lg.edges[i].b;
        if (i < lg.angles.size())
            a["ang"] = lg.angles[i];
        angles.push_back(std::move(a));
    }
    record["angles"] = std::move(angles);
}

std::optional<LineGraph> line_graph_from_json(const nlohmann::json &record, size_t num_base_edges) {
    if (!record.contains("angles"))
        return std::nullopt;
    LineGraph lg;
    lg.num_nodes = num_base_edges;
    const int n = static_cast<int>(num_base_edges);
    for (const auto &a : record["angles"]) {
        LineGraphEdge e{a.at("a").get<int>(), a.at("b").get<int>()};
        if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n)
            throw Error(ErrorKind::IndexMismatch, "line graph edge endpoint out of range");
        lg.edges.push_back(e);
        if (!a.contains("ang"))
            throw Error(ErrorKind::MissingVectors, "line graph edge without angle");
        lg.angles.push_back(a["ang"].get<double>());
    }
    return lg;
}

} // namespace crystgraph
