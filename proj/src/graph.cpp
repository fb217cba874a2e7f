#include <crystgraph/error.hpp>
#include <crystgraph/graph.hpp>

#include <algorithm>
#include <cmath>

namespace crystgraph {

std::string_view to_string(GraphKind kind) {
    return kind == GraphKind::unit_cell ? "unit_cell" : "asymmetric_unit";
}

std::string_view to_string(ReadoutMode mode) {
    switch (mode) {
    case ReadoutMode::mean: return "mean";
    case ReadoutMode::sum: return "sum";
    case ReadoutMode::min: return "min";
    case ReadoutMode::max: return "max";
    case ReadoutMode::attention: return "attention";
    }
    return "mean";
}

ReadoutMode readout_mode_from_string(std::string_view name) {
    for (auto m : {ReadoutMode::mean, ReadoutMode::sum, ReadoutMode::min, ReadoutMode::max,
                   ReadoutMode::attention})
        if (to_string(m) == name)
            return m;
    throw Error(ErrorKind::InvalidConfig, "unknown readout '" + std::string(name) + "'");
}

std::vector<int> CrystalGraph::in_degree() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto &e : edges)
        ++deg[static_cast<size_t>(e.dst)];
    return deg;
}

std::vector<int> CrystalGraph::out_degree() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto &e : edges)
        ++deg[static_cast<size_t>(e.src)];
    return deg;
}

int CrystalGraph::total_multiplicity() const {
    int total = 0;
    for (const auto &n : nodes)
        total += n.multiplicity;
    return total;
}

namespace {

GraphNode make_node(int species, int multiplicity) {
    const auto f = node_features(species);
    return {species, multiplicity, std::vector<double>(f.begin(), f.end())};
}

void check_indices(const CrystalStructure &structure, const std::vector<PeriodicEdge> &edges) {
    const int n = static_cast<int>(structure.size());
    for (const auto &e : edges)
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw Error(ErrorKind::IndexMismatch,
                        "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                            " outside " + std::to_string(n) + " sites");
}

} // namespace

CrystalGraph build_unit_graph(const CrystalStructure &structure,
                              const std::vector<PeriodicEdge> &edges) {
    check_indices(structure, edges);
    CrystalGraph g;
    g.id = structure.provenance();
    g.kind = GraphKind::unit_cell;
    for (const auto &s : structure.sites())
        g.nodes.push_back(make_node(s.species, 1));
    g.edges = edges;
    return g;
}

CrystalGraph build_asu_graph(const CrystalStructure &structure,
                             const std::vector<PeriodicEdge> &edges, const OrbitMap &orbits) {
    check_indices(structure, edges);
    if (orbits.representative_of.size() != structure.size())
        throw Error(ErrorKind::IndexMismatch, "orbit map does not match structure");

    std::vector<int> in_deg(structure.size(), 0);
    for (const auto &e : edges)
        ++in_deg[static_cast<size_t>(e.dst)];
    if (!edges.empty()) {
        for (size_t s = 0; s < structure.size(); ++s) {
            const int rep = orbits.representative_of[s];
            if (in_deg[s] == 0 || in_deg[s] != in_deg[static_cast<size_t>(rep)])
                throw Error(ErrorKind::IncompleteNeighborhood,
                            "site " + std::to_string(s) + " has " + std::to_string(in_deg[s]) +
                                " incoming edges, its representative " + std::to_string(rep) +
                                " has " + std::to_string(in_deg[static_cast<size_t>(rep)]));
        }
    }

    const Lattice &lattice = structure.lattice();
    CrystalGraph g;
    g.id = structure.provenance();
    g.kind = GraphKind::asymmetric_unit;
    for (size_t k = 0; k < orbits.num_orbits(); ++k) {
        const int rep = orbits.representatives[k];
        g.nodes.push_back(
            make_node(structure.site(static_cast<size_t>(rep)).species, orbits.multiplicity[k]));
    }
    for (size_t k = 0; k < orbits.num_orbits(); ++k) {
        const int rep = orbits.representatives[k];
        const Mat3 frame =
            lattice.cartesian_rotation(orbits.op_to_rep[static_cast<size_t>(rep)].rotation);
        for (const auto &e : edges) {
            if (e.dst != rep)
                continue;
            PeriodicEdge out = e;
            out.dst = static_cast<int>(k);
            out.src = orbits.orbit_index(orbits.representative_of[static_cast<size_t>(e.src)]);
            out.src_site = e.src;
            out.vector = frame * e.vector;
            g.src_frames.push_back(lattice.cartesian_rotation(
                orbits.op_to_rep[static_cast<size_t>(e.src)].rotation));
            g.edges.push_back(std::move(out));
        }
    }
    return g;
}

namespace {

void check_readout_inputs(size_t n, std::span<const int> multiplicities, ReadoutMode mode,
                          std::span<const double> scores) {
    if (multiplicities.size() != n)
        throw Error(ErrorKind::LengthMismatch, "values and multiplicities differ in length");
    if (mode == ReadoutMode::attention && scores.size() != n)
        throw Error(ErrorKind::LengthMismatch, "attention needs one score per node");
    for (int m : multiplicities)
        if (m < 1)
            throw Error(ErrorKind::ZeroMultiplicity, "multiplicities must be >= 1");
}

} // namespace

Eigen::VectorXd asu_readout(const Eigen::MatrixXd &values, std::span<const int> multiplicities,
                            ReadoutMode mode, std::span<const double> scores) {
    const auto n = static_cast<size_t>(values.rows());
    check_readout_inputs(n, multiplicities, mode, scores);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(values.cols());
    if (n == 0)
        return out;
    double total_m = 0.0;
    for (int m : multiplicities)
        total_m += m;
    const double num_nodes = static_cast<double>(n);

    switch (mode) {
    case ReadoutMode::sum:
        for (size_t v = 0; v < n; ++v)
            out += values.row(static_cast<long>(v)).transpose() * multiplicities[v];
        return out;
    case ReadoutMode::mean:
        for (size_t v = 0; v < n; ++v)
            out += values.row(static_cast<long>(v)).transpose() * multiplicities[v];
        return (out / num_nodes) * (num_nodes / total_m);
    case ReadoutMode::min:
        return values.colwise().minCoeff().transpose();
    case ReadoutMode::max:
        return values.colwise().maxCoeff().transpose();
    case ReadoutMode::attention: {
        const double top = *std::max_element(scores.begin(), scores.end());
        std::vector<double> w(n);
        double z = 0.0;
        for (size_t v = 0; v < n; ++v) {
            w[v] = std::exp(scores[v] - top);
            z += w[v] * multiplicities[v];
        }
        z /= total_m; // multiplicity-weighted mean of exp-scores
        for (size_t v = 0; v < n; ++v)
            out += values.row(static_cast<long>(v)).transpose() * (multiplicities[v] * w[v] / z);
        return (out / num_nodes) * (num_nodes / total_m);
    }
    }
    return out;
}

double asu_readout(std::span<const double> values, std::span<const int> multiplicities,
                   ReadoutMode mode, std::span<const double> scores) {
    Eigen::MatrixXd m(static_cast<long>(values.size()), 1);
    for (size_t i = 0; i < values.size(); ++i)
        m(static_cast<long>(i), 0) = values[i];
    return asu_readout(m, multiplicities, mode, scores)[0];
}

nlohmann::ordered_json graph_to_json(const CrystalGraph &graph) {
    nlohmann::ordered_json j;
    j["id"] = graph.id;
    j["kind"] = std::string(to_string(graph.kind));
    auto nodes = nlohmann::ordered_json::array();
    for (const auto &n : graph.nodes) {
        nlohmann::ordered_json node;
        node["z"] = n.species;
        node["m"] = n.multiplicity;
        node["feat"] = n.features;
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::ordered_json::array();
    for (const auto &e : graph.edges) {
        nlohmann::ordered_json edge;
        edge["s"] = e.src;
        edge["d"] = e.dst;
        edge["off"] = {e.offset[0], e.offset[1], e.offset[2]};
        edge["vec"] = {e.vector[0], e.vector[1], e.vector[2]};
        edge["dist"] = e.distance;
        if (e.ridge_area)
            edge["ridge"] = *e.ridge_area;
        edges.push_back(std::move(edge));
    }
    j["edges"] = std::move(edges);
    return j;
}

CrystalGraph graph_from_json(const nlohmann::json &j) {
    try {
        CrystalGraph g;
        g.id = j.at("id").get<std::string>();
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "unit_cell")
            g.kind = GraphKind::unit_cell;
        else if (kind == "asymmetric_unit")
            g.kind = GraphKind::asymmetric_unit;
        else
            throw Error(ErrorKind::InvalidConfig, "unknown graph kind '" + kind + "'");
        for (const auto &n : j.at("nodes")) {
            GraphNode node;
            node.species = n.at("z").get<int>();
            node.multiplicity = n.at("m").get<int>();
            node.features = n.at("feat").get<std::vector<double>>();
            g.nodes.push_back(std::move(node));
        }
        const int num_nodes = static_cast<int>(g.nodes.size());
        for (const auto &e : j.at("edges")) {
            PeriodicEdge edge;
            edge.src = e.at("s").get<int>();
            edge.dst = e.at("d").get<int>();
            if (edge.src < 0 || edge.src >= num_nodes || edge.dst < 0 || edge.dst >= num_nodes)
                throw Error(ErrorKind::IndexMismatch, "edge endpoint out of range");
            const auto off = e.at("off").get<std::vector<int>>();
            const auto vec = e.at("vec").get<std::vector<double>>();
            if (off.size() != 3 || vec.size() != 3)
                throw Error(ErrorKind::InvalidConfig, "edge off/vec need three values");
            edge.offset = IVec3(off[0], off[1], off[2]);
            edge.vector = Vec3(vec[0], vec[1], vec[2]);
            edge.distance = e.at("dist").get<double>();
            if (e.contains("ridge"))
                edge.ridge_area = e["ridge"].get<double>();
            g.edges.push_back(std::move(edge));
        }
        return g;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidConfig, std::string("graph JSON: ") + e.what());
    }
}

} // namespace crystgraph
