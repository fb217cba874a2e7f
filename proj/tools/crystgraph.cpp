#include <crystgraph/error.hpp>
#include <crystgraph/io.hpp>
#include <crystgraph/pipeline.hpp>
#include <crystgraph/stats.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace crystgraph;

namespace {

struct BatchOptions {
    std::vector<std::string> inputs;
    std::string out;
    std::string errors;
    bool skip_errors = false;
    int jobs = default_jobs();
};

struct Flags {
    std::string method = "knn";
    std::string symmetry = "detect";
    std::string variant;
};

void add_batch_options(CLI::App *cmd, BatchOptions &batch) {
    cmd->add_option("inputs", batch.inputs, "CIF/JSON files or directories")->required();
    cmd->add_option("-o,--out", batch.out, "Output NDJSON (default stdout)");
    cmd->add_option("--errors", batch.errors, "Per-file error report (NDJSON)");
    cmd->add_flag("--skip-errors", batch.skip_errors, "Exit 0 even if some inputs fail");
    cmd->add_option("-j,--jobs", batch.jobs, "Worker threads (default CRYSTGRAPH_JOBS)")
        ->check(CLI::PositiveNumber);
}

void add_edge_options(CLI::App *cmd, PipelineConfig &cfg, Flags &flags) {
    cmd->add_option("--method", flags.method, "knn | radius | voronoi")
        ->check(CLI::IsMember({"knn", "radius", "voronoi"}));
    cmd->add_option("--k", cfg.k, "Neighbors per atom (knn)");
    cmd->add_option("--eps", cfg.tie_epsilon, "Tie tolerance in angstrom (knn)");
    cmd->add_option("--r", cfg.r, "Cutoff radius in angstrom (radius)");
    cmd->add_flag("--symmetrize", cfg.symmetrize, "Add missing reverse edges");
    cmd->add_flag("--ridge-area", cfg.ridge_area, "Store Voronoi ridge areas");
    cmd->add_option("--area-eps", cfg.area_epsilon, "Drop Voronoi faces at or below this area");
}

void add_symmetry_options(CLI::App *cmd, PipelineConfig &cfg, Flags &flags) {
    cmd->add_option("--symprec", cfg.symprec, "Fractional symmetry tolerance");
    cmd->add_option("--symmetry", flags.symmetry, "detect | cif | none")
        ->check(CLI::IsMember({"detect", "cif", "none"}));
}

void add_line_graph_options(CLI::App *cmd, PipelineConfig &cfg, Flags &flags) {
    cmd->add_option("--variant", flags.variant, "destination | path")
        ->check(CLI::IsMember({"destination", "path"}));
    cmd->add_option("--order", cfg.line_graph_order, "1 or 2")->check(CLI::Range(1, 2));
    cmd->add_flag("--keep-backtrack", cfg.keep_backtrack, "Keep reverse-image pairs (path)");
}

void apply_flags(PipelineConfig &cfg, const Flags &flags) {
    cfg.method = edge_method_from_string(flags.method);
    cfg.symmetry = symmetry_source_from_string(flags.symmetry);
    if (!flags.variant.empty())
        cfg.line_graph = line_graph_variant_from_string(flags.variant);
}

class Output {
public:
    explicit Output(const std::string &path) {
        if (!path.empty() && path != "-") {
            m_file.open(path, std::ios::binary);
            if (!m_file)
                throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
        }
    }
    std::ostream &stream() { return m_file.is_open() ? m_file : std::cout; }

private:
    std::ofstream m_file;
};

int finish(const ExportSummary &summary, const BatchOptions &batch) {
    if (!batch.errors.empty())
        write_text_file(batch.errors, failure_report(summary.failures));
    for (const auto &f : summary.failures)
        std::cerr << f.file << ": " << f.message << '\n';
    if (!summary.failures.empty() && !batch.skip_errors)
        return 1;
    return 0;
}

int run_export(const BatchOptions &batch, PipelineConfig cfg, const Flags &flags) {
    apply_flags(cfg, flags);
    std::vector<fs::path> paths(batch.inputs.begin(), batch.inputs.end());
    Output out(batch.out);
    const auto summary = export_corpus(collect_inputs(paths), cfg, out.stream(), batch.jobs);
    out.stream().flush();
    return finish(summary, batch);
}

std::vector<CifStructure> load_corpus(const std::vector<std::string> &inputs,
                                      std::vector<ExportFailure> &failures) {
    std::vector<CifStructure> corpus;
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    for (const auto &p : collect_inputs(paths)) {
        try {
            corpus.push_back(load_structure(p));
        } catch (const Error &e) {
            failures.push_back({p.generic_string(), std::string(to_string(e.kind())), e.what()});
        }
    }
    return corpus;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Crystal graph construction and asymmetric-unit checks"};
    app.require_subcommand(1);

    // parse
    std::string parse_input, parse_json;
    auto *parse = app.add_subcommand("parse", "Parse a CIF and print the expanded cell");
    parse->add_option("file", parse_input, "CIF or JSON structure")->required();
    parse->add_option("--to-json", parse_json, "Write the structure JSON here");

    // graph / asu / linegraph / export
    BatchOptions graph_batch, asu_batch, lg_batch, export_batch;
    PipelineConfig graph_cfg, asu_cfg, lg_cfg, export_cfg;
    Flags graph_flags, asu_flags, lg_flags, export_flags;
    asu_cfg.asu = true;
    lg_flags.variant = "destination";

    auto *graph = app.add_subcommand("graph", "Build unit-cell multigraphs");
    add_batch_options(graph, graph_batch);
    add_edge_options(graph, graph_cfg, graph_flags);

    auto *asu = app.add_subcommand("asu", "Build asymmetric-unit graphs");
    add_batch_options(asu, asu_batch);
    add_edge_options(asu, asu_cfg, asu_flags);
    add_symmetry_options(asu, asu_cfg, asu_flags);

    auto *lg = app.add_subcommand("linegraph", "Build graphs with their line graphs");
    add_batch_options(lg, lg_batch);
    add_edge_options(lg, lg_cfg, lg_flags);
    add_symmetry_options(lg, lg_cfg, lg_flags);
    add_line_graph_options(lg, lg_cfg, lg_flags);
    lg->add_flag("--asu", lg_cfg.asu, "Use the asymmetric-unit graph as base");

    auto *exp = app.add_subcommand("export", "Full pipeline to NDJSON");
    add_batch_options(exp, export_batch);
    add_edge_options(exp, export_cfg, export_flags);
    add_symmetry_options(exp, export_cfg, export_flags);
    add_line_graph_options(exp, export_cfg, export_flags);
    exp->add_flag("--asu", export_cfg.asu, "Emit asymmetric-unit graphs");

    // forward
    std::string fwd_config, fwd_in = "-", fwd_out, fwd_preset = "coGN", fwd_errors;
    std::optional<std::uint64_t> fwd_seed;
    bool fwd_skip = false;
    int fwd_jobs = default_jobs();
    auto *fwd = app.add_subcommand("forward", "Reference network forward pass over graph records");
    fwd->add_option("--config", fwd_config, "Network config JSON");
    fwd->add_option("--preset", fwd_preset, "coGN | coNGN when no config is given")
        ->check(CLI::IsMember({"coGN", "coNGN"}));
    fwd->add_option("--seed", fwd_seed, "Parameter seed (overrides config)");
    fwd->add_option("--in", fwd_in, "Graph NDJSON (default stdin)");
    fwd->add_option("--out", fwd_out, "Prediction NDJSON (default stdout)");
    fwd->add_option("--errors", fwd_errors, "Per-record error report (NDJSON)");
    fwd->add_flag("--skip-errors", fwd_skip, "Exit 0 even if some records fail");
    fwd->add_option("-j,--jobs", fwd_jobs, "Worker threads")->check(CLI::PositiveNumber);

    // stats
    std::vector<std::string> stats_inputs;
    std::string stats_prefix;
    bool stats_sweep = false, stats_reduction = false;
    int stats_jobs = default_jobs();
    PipelineConfig stats_cfg;
    Flags stats_flags;
    auto *stats = app.add_subcommand("stats", "Dataset statistics and reduction factors");
    stats->add_option("inputs", stats_inputs, "CIF/JSON files or directories")->required();
    stats->add_option("-o,--out", stats_prefix,
                      "Output prefix; writes <prefix>.stats.json and friends");
    stats->add_flag("--sweep", stats_sweep, "Average degree over a method/parameter grid");
    stats->add_flag("--reduction", stats_reduction, "Unit vs asymmetric-unit size factors");
    stats->add_option("-j,--jobs", stats_jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_edge_options(stats, stats_cfg, stats_flags);
    add_symmetry_options(stats, stats_cfg, stats_flags);
    add_line_graph_options(stats, stats_cfg, stats_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*parse) {
            const auto loaded = load_structure(parse_input);
            const auto text = structure_to_json(loaded.structure).dump(2) + "\n";
            if (parse_json.empty())
                std::cout << text;
            else
                write_text_file(parse_json, text);
            std::cerr << loaded.structure.size() << " sites, " << loaded.ops.size()
                      << " listed operations\n";
            return 0;
        }
        if (*graph)
            return run_export(graph_batch, graph_cfg, graph_flags);
        if (*asu)
            return run_export(asu_batch, asu_cfg, asu_flags);
        if (*lg)
            return run_export(lg_batch, lg_cfg, lg_flags);
        if (*exp)
            return run_export(export_batch, export_cfg, export_flags);
        if (*fwd) {
            nlohmann::json cfg_json = nlohmann::json::object();
            if (!fwd_config.empty())
                cfg_json = nlohmann::json::parse(read_text_file(fwd_config));
            else
                cfg_json["preset"] = fwd_preset;
            if (fwd_seed)
                cfg_json["seed"] = *fwd_seed;
            const auto cfg = config_from_json(cfg_json);
            std::ifstream file;
            std::istream *in = &std::cin;
            if (fwd_in != "-") {
                file.open(fwd_in, std::ios::binary);
                if (!file)
                    throw Error(ErrorKind::Io, "cannot open " + fwd_in);
                in = &file;
            }
            Output out(fwd_out);
            const auto summary = forward_ndjson(*in, cfg, out.stream(), fwd_jobs);
            out.stream().flush();
            BatchOptions b;
            b.errors = fwd_errors;
            b.skip_errors = fwd_skip;
            return finish(summary, b);
        }
        if (*stats) {
            apply_flags(stats_cfg, stats_flags);
            std::vector<ExportFailure> failures;
            const auto corpus = load_corpus(stats_inputs, failures);
            std::vector<GraphBundle> bundles;
            for (const auto &input : corpus) {
                try {
                    bundles.push_back(build_graph(input, stats_cfg));
                } catch (const Error &e) {
                    failures.push_back({input.structure.provenance(),
                                        std::string(to_string(e.kind())), e.what()});
                }
            }
            auto summary = corpus_stats_to_json(corpus_stats(bundles));
            summary["failed"] = failures.size();
            const auto emit = [&](const std::string &suffix, const std::string &text) {
                if (stats_prefix.empty())
                    std::cout << text;
                else
                    write_text_file(stats_prefix + suffix, text);
            };
            emit(".stats.json", summary.dump(2) + "\n");
            if (stats_sweep) {
                const auto rows = sweep_connectivity(corpus, default_sweep_grid(), stats_jobs);
                emit(".sweep.csv", sweep_to_csv(rows));
                emit(".sweep.json", sweep_to_json(rows).dump(2) + "\n");
            }
            if (stats_reduction) {
                const auto report = asu_reduction_report(corpus, stats_cfg, stats_jobs);
                emit(".reduction.csv", reduction_report_to_csv(report));
                emit(".reduction.json", reduction_report_to_json(report).dump(2) + "\n");
                std::cerr << "mean node factor " << report.mean_node_factor
                          << " (reference " << ReductionReport::kReferenceFactor << ")\n";
            }
            for (const auto &f : failures)
                std::cerr << f.file << ": " << f.message << '\n';
            return 0;
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
