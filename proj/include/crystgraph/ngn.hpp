#pragma once

#include <crystgraph/graph.hpp>
#include <crystgraph/line_graph.hpp>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace crystgraph {

struct GaussBasisConfig {
    int count = 32;
    double lo = 0.0;
    double hi = 8.0;
    double width = 8.0 / 31.0; // sigma; defaults to the centre spacing

    /// Evenly spaced centres on [lo, hi] with sigma equal to their spacing.
    static GaussBasisConfig spaced(int count, double lo, double hi);
    double center(int c) const;
    void validate() const;
};

/// exp(-(value - mu_c)^2 / (2 sigma^2)) for every centre mu_c, unnormalised.
Eigen::VectorXd gauss_basis(double value, const GaussBasisConfig &cfg);

enum class Activation { swish, relu, identity };
enum class NodeUpdate { residual, gated };
enum class EdgeAggregation { sum, mean };

struct NgnConfig {
    int T = 5;    // outer processing blocks
    int T_lg = 0; // nested line-graph blocks per outer block; 0 = plain GN
    int width = 128;
    int mlp_depth_edge = 5;
    int mlp_depth_node = 1;
    int mlp_depth_global = 1;
    NodeUpdate node_update = NodeUpdate::residual;
    EdgeAggregation edge_agg = EdgeAggregation::sum;
    ReadoutMode readout = ReadoutMode::mean;
    std::uint64_t seed = 0;
    Activation activation = Activation::swish;
    GaussBasisConfig distance_basis = GaussBasisConfig::spaced(32, 0.0, 8.0);
    GaussBasisConfig angle_basis = GaussBasisConfig::spaced(16, 0.0, 3.141592653589793);
    /// Per-block global update with node and edge aggregation.
    bool use_global = false;
    /// Multiplies every initial weight; 0 gives an all-zero network.
    double weight_scale = 1.0;

    /// Non-nested preset: T = 5, five-layer edge MLP, residual update, mean readout.
    static NgnConfig coGN();
    /// Nested preset: coGN with two line-graph blocks inside every block.
    static NgnConfig coNGN();

    void validate() const;
    /// FNV-1a of the canonical JSON form.
    std::uint64_t hash() const;
};

nlohmann::ordered_json config_to_json(const NgnConfig &cfg);
/// Missing fields keep the values of `preset` (or of coGN when the JSON has
/// "preset": "coGN" / "coNGN").
NgnConfig config_from_json(const nlohmann::json &j);

/// Fully connected layer, y = x W + b with x as a row vector.
struct Dense {
    Eigen::MatrixXd weight; // in x out
    Eigen::RowVectorXd bias;

    Eigen::Index in() const { return weight.rows(); }
    Eigen::Index out() const { return weight.cols(); }
};

/// Named layers of a network. Weights come from std::mt19937_64 seeded per
/// layer with splitmix64(seed ^ fnv1a(name)); each 64-bit draw x maps to
/// (x >> 11) * 2^-53 in [0, 1), then to U(-1, 1) * weight_scale / sqrt(fan_in),
/// filled row-major. Biases start at zero.
class ParameterStore {
public:
    const Dense &at(const std::string &name) const;
    Dense &at(const std::string &name);
    bool contains(const std::string &name) const { return m_layers.contains(name); }
    const std::map<std::string, Dense> &layers() const { return m_layers; }

    void add(const std::string &name, Dense layer) { m_layers[name] = std::move(layer); }
    size_t parameter_count() const;
    /// FNV-1a over layer names and the bit patterns of every value.
    std::uint64_t checksum() const;

private:
    std::map<std::string, Dense> m_layers;
};

inline constexpr std::string_view kPrngAlgorithm = "mt19937_64+splitmix64";

ParameterStore init_params(const NgnConfig &cfg);

struct FeatureSet {
    Eigen::MatrixXd X_E;     // messages of the last block, one row per edge
    Eigen::MatrixXd X_V;     // final node features
    Eigen::VectorXd x_G;     // aggregated graph feature fed to the output layer
    Eigen::MatrixXd X_angle; // embedded line-graph edge features
};

struct ForwardResult {
    double prediction = 0.0;
    FeatureSet trace;
};

/// Inference-only nested graph network. With cfg.T_lg > 0 the line graph of
/// `graph` is required. Asymmetric-unit graphs use multiplicity-corrected
/// aggregation in the readout and in the optional global path.
ForwardResult forward(const CrystalGraph &graph, const LineGraph *line_graph,
                      const NgnConfig &cfg, const ParameterStore &params);

/// Same network with every nested code path compiled out.
ForwardResult forward_plain_gn(const CrystalGraph &graph, const NgnConfig &cfg,
                               const ParameterStore &params);

std::string_view to_string(Activation a);
std::string_view to_string(NodeUpdate u);
std::string_view to_string(EdgeAggregation a);

} // namespace crystgraph
