#include <crystgraph/error.hpp>
#include <crystgraph/ngn.hpp>

#include <bit>
#include <cmath>
#include <random>

namespace crystgraph {

// ---------------------------------------------------------------- basis

GaussBasisConfig GaussBasisConfig::spaced(int count, double lo, double hi) {
    GaussBasisConfig cfg{count, lo, hi, 1.0};
    cfg.width = count > 1 ? (hi - lo) / (count - 1) : (hi - lo);
    return cfg;
}

double GaussBasisConfig::center(int c) const {
    return count > 1 ? lo + (hi - lo) * c / (count - 1) : lo;
}

void GaussBasisConfig::validate() const {
    if (count < 1 || !(hi > lo) || !(width > 0.0))
        throw Error(ErrorKind::InvalidConfig, "gauss basis needs count >= 1, hi > lo, width > 0");
}

Eigen::VectorXd gauss_basis(double value, const GaussBasisConfig &cfg) {
    cfg.validate();
    Eigen::VectorXd out(cfg.count);
    const double inv = 1.0 / (2.0 * cfg.width * cfg.width);
    for (int c = 0; c < cfg.count; ++c) {
        const double d = value - cfg.center(c);
        out[c] = std::exp(-d * d * inv);
    }
    return out;
}

// ---------------------------------------------------------------- config

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::swish: return "swish";
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    }
    return "swish";
}
std::string_view to_string(NodeUpdate u) { return u == NodeUpdate::residual ? "residual" : "gated"; }
std::string_view to_string(EdgeAggregation a) { return a == EdgeAggregation::sum ? "sum" : "mean"; }

NgnConfig NgnConfig::coGN() { return NgnConfig{}; }

NgnConfig NgnConfig::coNGN() {
    NgnConfig cfg;
    cfg.T_lg = 2;
    return cfg;
}

void NgnConfig::validate() const {
    if (T < 1 || T_lg < 0 || width < 1 || mlp_depth_edge < 1 || mlp_depth_node < 1 ||
        mlp_depth_global < 1)
        throw Error(ErrorKind::InvalidConfig, "depths and widths must be positive");
    if (!std::isfinite(weight_scale))
        throw Error(ErrorKind::InvalidConfig, "weight_scale must be finite");
    distance_basis.validate();
    angle_basis.validate();
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

template <typename Enum, size_t N>
Enum enum_from(std::string_view name, const std::array<Enum, N> &all, const char *what) {
    for (Enum e : all)
        if (to_string(e) == name)
            return e;
    throw Error(ErrorKind::InvalidConfig, std::string("unknown ") + what + " '" +
                                              std::string(name) + "'");
}

nlohmann::ordered_json basis_to_json(const GaussBasisConfig &b) {
    nlohmann::ordered_json j;
    j["count"] = b.count;
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    j["width"] = b.width;
    return j;
}

GaussBasisConfig basis_from_json(const nlohmann::json &j, GaussBasisConfig base) {
    const bool respaced = j.contains("count") || j.contains("lo") || j.contains("hi");
    base.count = j.value("count", base.count);
    base.lo = j.value("lo", base.lo);
    base.hi = j.value("hi", base.hi);
    if (j.contains("width"))
        base.width = j["width"].get<double>();
    else if (respaced)
        base.width = GaussBasisConfig::spaced(base.count, base.lo, base.hi).width;
    return base;
}

} // namespace

nlohmann::ordered_json config_to_json(const NgnConfig &cfg) {
    nlohmann::ordered_json j;
    j["T"] = cfg.T;
    j["T_lg"] = cfg.T_lg;
    j["width"] = cfg.width;
    j["mlp_depth_edge"] = cfg.mlp_depth_edge;
    j["mlp_depth_node"] = cfg.mlp_depth_node;
    j["mlp_depth_global"] = cfg.mlp_depth_global;
    j["node_update"] = std::string(to_string(cfg.node_update));
    j["edge_agg"] = std::string(to_string(cfg.edge_agg));
    j["readout"] = std::string(to_string(cfg.readout));
    j["seed"] = cfg.seed;
    j["activation"] = std::string(to_string(cfg.activation));
    j["distance_basis"] = basis_to_json(cfg.distance_basis);
    j["angle_basis"] = basis_to_json(cfg.angle_basis);
    j["use_global"] = cfg.use_global;
    j["weight_scale"] = cfg.weight_scale;
    return j;
}

NgnConfig config_from_json(const nlohmann::json &j) {
    try {
        NgnConfig cfg;
        if (j.contains("preset")) {
            const auto preset = j["preset"].get<std::string>();
            if (preset == "coGN")
                cfg = NgnConfig::coGN();
            else if (preset == "coNGN")
                cfg = NgnConfig::coNGN();
            else
                throw Error(ErrorKind::InvalidConfig, "unknown preset '" + preset + "'");
        }
        cfg.T = j.value("T", cfg.T);
        cfg.T_lg = j.value("T_lg", cfg.T_lg);
        cfg.width = j.value("width", cfg.width);
        cfg.mlp_depth_edge = j.value("mlp_depth_edge", cfg.mlp_depth_edge);
        cfg.mlp_depth_node = j.value("mlp_depth_node", cfg.mlp_depth_node);
        cfg.mlp_depth_global = j.value("mlp_depth_global", cfg.mlp_depth_global);
        if (j.contains("node_update"))
            cfg.node_update = enum_from(j["node_update"].get<std::string>(),
                                        std::array{NodeUpdate::residual, NodeUpdate::gated},
                                        "node_update");
        if (j.contains("edge_agg"))
            cfg.edge_agg = enum_from(j["edge_agg"].get<std::string>(),
                                     std::array{EdgeAggregation::sum, EdgeAggregation::mean},
                                     "edge_agg");
        if (j.contains("readout"))
            cfg.readout = readout_mode_from_string(j["readout"].get<std::string>());
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("activation"))
            cfg.activation = enum_from(
                j["activation"].get<std::string>(),
                std::array{Activation::swish, Activation::relu, Activation::identity},
                "activation");
        if (j.contains("distance_basis"))
            cfg.distance_basis = basis_from_json(j["distance_basis"], cfg.distance_basis);
        if (j.contains("angle_basis"))
            cfg.angle_basis = basis_from_json(j["angle_basis"], cfg.angle_basis);
        cfg.use_global = j.value("use_global", cfg.use_global);
        cfg.weight_scale = j.value("weight_scale", cfg.weight_scale);
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidConfig, std::string("config JSON: ") + e.what());
    }
}

std::uint64_t NgnConfig::hash() const { return fnv1a(config_to_json(*this).dump()); }

// ---------------------------------------------------------------- parameters

const Dense &ParameterStore::at(const std::string &name) const {
    const auto it = m_layers.find(name);
    if (it == m_layers.end())
        throw Error(ErrorKind::InvalidConfig, "missing layer " + name);
    return it->second;
}

Dense &ParameterStore::at(const std::string &name) {
    const auto it = m_layers.find(name);
    if (it == m_layers.end())
        throw Error(ErrorKind::InvalidConfig, "missing layer " + name);
    return it->second;
}

size_t ParameterStore::parameter_count() const {
    size_t n = 0;
    for (const auto &[name, layer] : m_layers)
        n += static_cast<size_t>(layer.weight.size() + layer.bias.size());
    return n;
}

std::uint64_t ParameterStore::checksum() const {
    std::uint64_t h = kFnvOffset;
    for (const auto &[name, layer] : m_layers) {
        h = fnv1a(name, h);
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
            for (Eigen::Index k = 0; k < layer.weight.cols(); ++k)
                h = fnv1a_u64(std::bit_cast<std::uint64_t>(layer.weight(i, k)), h);
        for (Eigen::Index k = 0; k < layer.bias.size(); ++k)
            h = fnv1a_u64(std::bit_cast<std::uint64_t>(layer.bias[k]), h);
    }
    return h;
}

namespace {

constexpr int kEmbeddingRows = kMaxAtomicNumber + 1;

Dense seeded_dense(const NgnConfig &cfg, const std::string &name, Eigen::Index in,
                   Eigen::Index out, double fan_in) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ fnv1a(name)));
    const double scale = cfg.weight_scale / std::sqrt(fan_in);
    Dense d{Eigen::MatrixXd(in, out), Eigen::RowVectorXd::Zero(out)};
    for (Eigen::Index i = 0; i < in; ++i) {
        for (Eigen::Index k = 0; k < out; ++k) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            d.weight(i, k) = (2.0 * u - 1.0) * scale;
        }
    }
    return d;
}

void add_mlp(ParameterStore &store, const NgnConfig &cfg, const std::string &prefix,
             Eigen::Index in, int depth) {
    const Eigen::Index w = cfg.width;
    for (int l = 0; l < depth; ++l) {
        const Eigen::Index fan = l == 0 ? in : w;
        const std::string name = prefix + "." + std::to_string(l);
        store.add(name, seeded_dense(cfg, name, fan, w, static_cast<double>(fan)));
    }
}

void add_gn_block(ParameterStore &store, const NgnConfig &cfg, const std::string &prefix) {
    const Eigen::Index w = cfg.width;
    add_mlp(store, cfg, prefix + ".edge", (cfg.use_global ? 4 : 3) * w, cfg.mlp_depth_edge);
    add_mlp(store, cfg, prefix + ".node", w, cfg.mlp_depth_node);
    if (cfg.node_update == NodeUpdate::gated) {
        for (const char *gate : {".gate_z", ".gate_c"}) {
            const std::string name = prefix + gate;
            store.add(name, seeded_dense(cfg, name, 2 * w, w, 2.0 * static_cast<double>(w)));
        }
    }
}

} // namespace

ParameterStore init_params(const NgnConfig &cfg) {
    cfg.validate();
    ParameterStore store;
    const Eigen::Index w = cfg.width;
    store.add("embed.edge", seeded_dense(cfg, "embed.edge", cfg.distance_basis.count, w,
                                         cfg.distance_basis.count));
    store.add("embed.node_table", seeded_dense(cfg, "embed.node_table", kEmbeddingRows, w, 1.0));
    store.add("embed.node_features", seeded_dense(cfg, "embed.node_features", kNumNodeFeatures,
                                                  w, kNumNodeFeatures));
    if (cfg.T_lg > 0)
        store.add("embed.angle", seeded_dense(cfg, "embed.angle", cfg.angle_basis.count, w,
                                              cfg.angle_basis.count));
    for (int t = 0; t < cfg.T; ++t) {
        const std::string block = "block" + std::to_string(t);
        add_gn_block(store, cfg, block);
        if (cfg.use_global)
            add_mlp(store, cfg, block + ".global", 3 * w, cfg.mlp_depth_global);
        for (int u = 0; u < cfg.T_lg; ++u)
            add_gn_block(store, cfg, block + ".nested" + std::to_string(u));
    }
    if (cfg.readout == ReadoutMode::attention)
        store.add("readout.attention", seeded_dense(cfg, "readout.attention", w, 1, w));
    store.add("readout.output", seeded_dense(cfg, "readout.output", w, 1, w));
    return store;
}

// ---------------------------------------------------------------- forward

namespace {

using Matrix = Eigen::MatrixXd;

// Fixed scales bring the static element features to order one.
constexpr std::array<double, kNumNodeFeatures> kFeatureScale = {100.0, 100.0, 1.0,
                                                                 4.0,   10.0,  4.0};

void activate(Matrix &x, Activation a) {
    switch (a) {
    case Activation::identity: return;
    case Activation::relu: x = x.cwiseMax(0.0); return;
    case Activation::swish: x = x.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); }); return;
    }
}

Matrix apply_dense(const Dense &d, const Matrix &x) {
    Matrix y = x * d.weight;
    y.rowwise() += d.bias;
    return y;
}

Matrix apply_mlp(const ParameterStore &p, const std::string &prefix, int depth, Matrix x,
                 Activation a) {
    for (int l = 0; l < depth; ++l) {
        x = apply_dense(p.at(prefix + "." + std::to_string(l)), x);
        activate(x, a);
    }
    return x;
}

struct Topology {
    std::vector<int> src;
    std::vector<int> dst;
    std::vector<std::vector<int>> incoming; // per node, ascending edge index
};

Topology topology_of(size_t num_nodes, std::vector<int> src, std::vector<int> dst) {
    Topology t{std::move(src), std::move(dst), std::vector<std::vector<int>>(num_nodes)};
    for (size_t e = 0; e < t.dst.size(); ++e)
        t.incoming[static_cast<size_t>(t.dst[e])].push_back(static_cast<int>(e));
    return t;
}

Matrix gather_rows(const Matrix &x, const std::vector<int> &idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    return out;
}

Matrix aggregate(const Matrix &messages, const Topology &topo, size_t num_nodes,
                 EdgeAggregation mode) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(num_nodes), messages.cols());
    for (size_t v = 0; v < num_nodes; ++v) {
        const auto &in = topo.incoming[v];
        for (int e : in)
            out.row(static_cast<Eigen::Index>(v)) += messages.row(e);
        if (mode == EdgeAggregation::mean && !in.empty())
            out.row(static_cast<Eigen::Index>(v)) /= static_cast<double>(in.size());
    }
    return out;
}

Matrix sigmoid(const Matrix &x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Edge update of a GN block.
Matrix edge_messages(const ParameterStore &p, const NgnConfig &cfg, const std::string &prefix,
                     const Matrix &edge_features, const Matrix &nodes,
                     const Eigen::RowVectorXd *global, const Topology &topo) {
    const Eigen::Index m = edge_features.rows();
    const Eigen::Index w = cfg.width;
    Matrix input(m, (global ? 4 : 3) * w);
    input.leftCols(w) = edge_features;
    input.middleCols(w, w) = gather_rows(nodes, topo.dst);     // receiver
    input.middleCols(2 * w, w) = gather_rows(nodes, topo.src); // sender
    if (global)
        input.rightCols(w) = global->replicate(m, 1);
    return apply_mlp(p, prefix + ".edge", cfg.mlp_depth_edge, std::move(input), cfg.activation);
}

Matrix node_update(const ParameterStore &p, const NgnConfig &cfg, const std::string &prefix,
                   const Matrix &nodes, const Matrix &aggregated) {
    Matrix h = apply_mlp(p, prefix + ".node", cfg.mlp_depth_node, aggregated, cfg.activation);
    if (cfg.node_update == NodeUpdate::residual)
        return nodes + h;
    // Single-gate recurrent cell:
    //   z = sigmoid([x | h] Wz + bz), c = tanh([x | h] Wc + bc), x' = (1 - z) x + z c
    Matrix xh(nodes.rows(), 2 * cfg.width);
    xh.leftCols(cfg.width) = nodes;
    xh.rightCols(cfg.width) = h;
    const Matrix z = sigmoid(apply_dense(p.at(prefix + ".gate_z"), xh));
    const Matrix c = apply_dense(p.at(prefix + ".gate_c"), xh).array().tanh().matrix();
    return (1.0 - z.array()).matrix().cwiseProduct(nodes) + z.cwiseProduct(c);
}

void check_finite(const Matrix &x, int block, const char *what) {
    if (!x.allFinite())
        throw Error(ErrorKind::NonFiniteActivation,
                    std::string(what) + " in block " + std::to_string(block));
}

template <bool kNesting>
ForwardResult forward_impl(const CrystalGraph &graph, const LineGraph *line_graph,
                           const NgnConfig &cfg, const ParameterStore &p) {
    cfg.validate();
    const size_t n = graph.num_nodes();
    const size_t m = graph.num_edges();
    const Eigen::Index w = cfg.width;
    if (n == 0)
        throw Error(ErrorKind::EmptyStructure, "forward on a graph without nodes");

    const bool nested = kNesting && cfg.T_lg > 0;
    if constexpr (kNesting) {
        if (nested) {
            if (line_graph == nullptr)
                throw Error(ErrorKind::MissingLineGraph, "T_lg > 0 needs a line graph");
            if (line_graph->num_nodes != m || line_graph->angles.size() != line_graph->num_edges())
                throw Error(ErrorKind::IndexMismatch, "line graph does not match graph edges");
        }
    }

    std::vector<int> src(m), dst(m), dst_multiplicity(m), node_multiplicity(n);
    for (size_t e = 0; e < m; ++e) {
        src[e] = graph.edges[e].src;
        dst[e] = graph.edges[e].dst;
        dst_multiplicity[e] = graph.nodes[static_cast<size_t>(dst[e])].multiplicity;
    }
    for (size_t v = 0; v < n; ++v)
        node_multiplicity[v] = graph.nodes[v].multiplicity;
    const Topology topo = topology_of(n, std::move(src), std::move(dst));

    // Embedding block.
    Matrix basis(static_cast<Eigen::Index>(m), cfg.distance_basis.count);
    for (size_t e = 0; e < m; ++e)
        basis.row(static_cast<Eigen::Index>(e)) =
            gauss_basis(graph.edges[e].distance, cfg.distance_basis).transpose();
    Matrix edge_embedding = apply_dense(p.at("embed.edge"), basis);
    activate(edge_embedding, cfg.activation);

    Matrix features(static_cast<Eigen::Index>(n), kNumNodeFeatures);
    Matrix nodes(static_cast<Eigen::Index>(n), w);
    const Dense &table = p.at("embed.node_table");
    for (size_t v = 0; v < n; ++v) {
        const auto &node = graph.nodes[v];
        if (node.features.size() != kNumNodeFeatures)
            throw Error(ErrorKind::IndexMismatch, "node features must have 6 entries");
        for (int k = 0; k < kNumNodeFeatures; ++k)
            features(static_cast<Eigen::Index>(v), k) =
                node.features[static_cast<size_t>(k)] / kFeatureScale[static_cast<size_t>(k)];
        if (node.species < 1 || node.species > kMaxAtomicNumber)
            throw Error(ErrorKind::InvalidStructure, "node species out of range");
    }
    nodes = apply_dense(p.at("embed.node_features"), features);
    for (size_t v = 0; v < n; ++v)
        nodes.row(static_cast<Eigen::Index>(v)) += table.weight.row(graph.nodes[v].species);
    activate(nodes, cfg.activation);
    check_finite(edge_embedding, 0, "edge embedding");
    check_finite(nodes, 0, "node embedding");

    Matrix angle_embedding;
    Topology lg_topo;
    if constexpr (kNesting) {
        if (nested) {
            const auto &lg = *line_graph;
            Matrix abasis(static_cast<Eigen::Index>(lg.num_edges()), cfg.angle_basis.count);
            std::vector<int> a(lg.num_edges()), b(lg.num_edges());
            for (size_t k = 0; k < lg.num_edges(); ++k) {
                abasis.row(static_cast<Eigen::Index>(k)) =
                    gauss_basis(lg.angles[k], cfg.angle_basis).transpose();
                a[k] = lg.edges[k].a;
                b[k] = lg.edges[k].b;
            }
            angle_embedding = apply_dense(p.at("embed.angle"), abasis);
            activate(angle_embedding, cfg.activation);
            lg_topo = topology_of(m, std::move(a), std::move(b));
        }
    }

    Eigen::RowVectorXd global = Eigen::RowVectorXd::Zero(w);
    const Eigen::RowVectorXd *global_ptr = cfg.use_global ? &global : nullptr;
    Matrix messages;
    for (int t = 0; t < cfg.T; ++t) {
        const std::string block = "block" + std::to_string(t);
        // Edge features are not carried between blocks; every block starts
        // from the distance embedding.
        messages = edge_messages(p, cfg, block, edge_embedding, nodes, global_ptr, topo);

        if constexpr (kNesting) {
            if (nested) {
                // Messages act as node features of L(G).
                for (int u = 0; u < cfg.T_lg; ++u) {
                    const std::string inner = block + ".nested" + std::to_string(u);
                    const Matrix lg_messages = edge_messages(p, cfg, inner, angle_embedding,
                                                             messages, global_ptr, lg_topo);
                    const Matrix agg = aggregate(lg_messages, lg_topo, m, cfg.edge_agg);
                    messages = node_update(p, cfg, inner, messages, agg);
                }
            }
        }

        const Matrix agg = aggregate(messages, topo, n, cfg.edge_agg);
        nodes = node_update(p, cfg, block, nodes, agg);
        check_finite(messages, t + 1, "edge messages");
        check_finite(nodes, t + 1, "node features");

        if (cfg.use_global) {
            const Eigen::VectorXd node_agg =
                asu_readout(nodes, node_multiplicity, ReadoutMode::mean);
            const Eigen::VectorXd edge_agg =
                m > 0 ? asu_readout(messages, dst_multiplicity, ReadoutMode::mean)
                      : Eigen::VectorXd::Zero(w);
            Matrix g(1, 3 * w);
            g.row(0) << global, node_agg.transpose(), edge_agg.transpose();
            global = apply_mlp(p, block + ".global", cfg.mlp_depth_global, g, cfg.activation).row(0);
            check_finite(global, t + 1, "global features");
        }
    }

    // Readout block: identity node update, corrected aggregation, linear output.
    std::vector<double> scores;
    if (cfg.readout == ReadoutMode::attention) {
        const Matrix s = apply_dense(p.at("readout.attention"), nodes);
        scores.assign(s.data(), s.data() + s.size());
    }
    const Eigen::VectorXd pooled = asu_readout(nodes, node_multiplicity, cfg.readout, scores);
    const Dense &out = p.at("readout.output");
    const double prediction = pooled.dot(out.weight.col(0)) + out.bias[0];
    if (!std::isfinite(prediction))
        throw Error(ErrorKind::NonFiniteActivation, "readout in block " + std::to_string(cfg.T + 1));

    ForwardResult result;
    result.prediction = prediction;
    result.trace.X_E = std::move(messages);
    result.trace.X_V = std::move(nodes);
    result.trace.x_G = pooled;
    result.trace.X_angle = std::move(angle_embedding);
    return result;
}

} // namespace

ForwardResult forward(const CrystalGraph &graph, const LineGraph *line_graph,
                      const NgnConfig &cfg, const ParameterStore &params) {
    return forward_impl<true>(graph, line_graph, cfg, params);
}

ForwardResult forward_plain_gn(const CrystalGraph &graph, const NgnConfig &cfg,
                               const ParameterStore &params) {
    return forward_impl<false>(graph, nullptr, cfg, params);
}

} // namespace crystgraph
