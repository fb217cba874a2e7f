#include <crystgraph/error.hpp>
#include <crystgraph/io.hpp>
#include <crystgraph/neighbors.hpp>
#include <crystgraph/pipeline.hpp>
#include <crystgraph/symmetry.hpp>
#include <crystgraph/voronoi.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

namespace crystgraph {

std::string_view to_string(EdgeMethod method) {
    switch (method) {
    case EdgeMethod::knn: return "knn";
    case EdgeMethod::radius: return "radius";
    case EdgeMethod::voronoi: return "voronoi";
    }
    return "knn";
}

EdgeMethod edge_method_from_string(std::string_view name) {
    for (auto m : {EdgeMethod::knn, EdgeMethod::radius, EdgeMethod::voronoi})
        if (to_string(m) == name)
            return m;
    throw Error(ErrorKind::InvalidConfig, "unknown edge method '" + std::string(name) + "'");
}

std::string_view to_string(SymmetrySource source) {
    switch (source) {
    case SymmetrySource::detect: return "detect";
    case SymmetrySource::cif: return "cif";
    case SymmetrySource::none: return "none";
    }
    return "detect";
}

SymmetrySource symmetry_source_from_string(std::string_view name) {
    for (auto s : {SymmetrySource::detect, SymmetrySource::cif, SymmetrySource::none})
        if (to_string(s) == name)
            return s;
    throw Error(ErrorKind::InvalidConfig, "unknown symmetry source '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
    if (method == EdgeMethod::knn || method == EdgeMethod::radius) {
        NeighborConfig nc;
        nc.method = method == EdgeMethod::knn ? NeighborMethod::knn : NeighborMethod::radius;
        nc.k = k;
        nc.r = r;
        nc.tie_epsilon = tie_epsilon;
        nc.validate();
    }
    if (!(area_epsilon >= 0.0))
        throw Error(ErrorKind::InvalidConfig, "area epsilon must be non-negative");
    if (!(symprec > 0.0))
        throw Error(ErrorKind::InvalidConfig, "symprec must be positive");
    if (line_graph_order != 1 && line_graph_order != 2)
        throw Error(ErrorKind::InvalidConfig, "line graph order must be 1 or 2");
}

std::vector<PeriodicEdge> build_edges(const CrystalStructure &structure,
                                      const PipelineConfig &config) {
    std::vector<PeriodicEdge> edges;
    switch (config.method) {
    case EdgeMethod::knn: edges = knn_edges(structure, config.k, config.tie_epsilon); break;
    case EdgeMethod::radius: edges = radius_edges(structure, config.r); break;
    case EdgeMethod::voronoi:
        return voronoi_edges(structure, config.ridge_area, config.area_epsilon);
    }
    if (config.symmetrize)
        edges = symmetrize_edges(std::move(edges));
    return edges;
}

std::vector<SymmetryOp> symmetry_ops_for(const CifStructure &input, const PipelineConfig &config) {
    switch (config.symmetry) {
    case SymmetrySource::detect: return find_symmetry_ops(input.structure, config.symprec);
    case SymmetrySource::cif:
        if (!input.ops.empty())
            return input.ops;
        break;
    case SymmetrySource::none: break;
    }
    return {SymmetryOp::identity()};
}

GraphBundle build_graph(const CifStructure &input, const PipelineConfig &config) {
    config.validate();
    const auto &structure = input.structure;
    const auto edges = build_edges(structure, config);
    GraphBundle bundle;
    if (config.asu) {
        const auto ops = symmetry_ops_for(input, config);
        const auto orbits = compute_orbits(structure, ops, config.symprec);
        bundle.graph = build_asu_graph(structure, edges, orbits);
    } else {
        bundle.graph = build_unit_graph(structure, edges);
    }
    if (config.line_graph) {
        bundle.line_graph = line_graph(bundle.graph, *config.line_graph, config.keep_backtrack);
        if (config.line_graph_order == 2)
            bundle.line_graph2 = line_graph_order2(*bundle.line_graph, config.keep_backtrack);
    }
    return bundle;
}

nlohmann::ordered_json graph_record(const GraphBundle &bundle) {
    auto record = graph_to_json(bundle.graph);
    if (bundle.line_graph) {
        record["lg_variant"] = std::string(to_string(bundle.line_graph->variant));
        add_line_graph_json(record, *bundle.line_graph);
    }
    if (bundle.line_graph2) {
        auto pairs = nlohmann::ordered_json::array();
        for (const auto &e : bundle.line_graph2->edges)
            pairs.push_back({e.a, e.b});
        record["lg2"] = std::move(pairs);
    }
    return record;
}

int default_jobs() {
    if (const char *env = std::getenv("CRYSTGRAPH_JOBS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(std::min<long>(v, 1024));
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(size_t count, int jobs, const std::function<void(size_t)> &task) {
    const size_t workers = std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex mutex;
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

void ordered_parallel(size_t count, int jobs, const std::function<std::string(size_t)> &task,
                      const std::function<void(size_t, std::string)> &sink) {
    const size_t workers = std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i)
            sink(i, task(i));
        return;
    }
    std::vector<std::optional<std::string>> slots(count);
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < count; i = next++) {
                    std::string result;
                    try {
                        result = task(i);
                    } catch (...) {
                        std::lock_guard lock(mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                    std::lock_guard lock(mutex);
                    slots[i] = std::move(result);
                    ready.notify_all();
                }
            });
        }
        for (size_t i = 0; i < count; ++i) {
            std::string value;
            {
                std::unique_lock lock(mutex);
                ready.wait(lock, [&] { return slots[i].has_value(); });
                value = std::move(*slots[i]);
                slots[i].reset();
            }
            sink(i, std::move(value));
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

std::vector<std::filesystem::path> collect_inputs(const std::vector<std::filesystem::path> &paths) {
    std::vector<std::filesystem::path> out;
    for (const auto &p : paths) {
        if (std::filesystem::is_directory(p)) {
            std::vector<std::filesystem::path> found;
            for (const auto &entry : std::filesystem::directory_iterator(p)) {
                const auto ext = entry.path().extension();
                if (entry.is_regular_file() && (ext == ".cif" || ext == ".json"))
                    found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

namespace {

constexpr char kFailureMarker = '\x01';

std::string encode_failure(std::string_view kind, std::string_view message) {
    return std::string(1, kFailureMarker) + std::string(kind) + '\n' + std::string(message);
}

template <typename Fn> std::string guarded(Fn &&fn) {
    try {
        return fn();
    } catch (const Error &e) {
        return encode_failure(to_string(e.kind()), e.what());
    } catch (const nlohmann::json::exception &e) {
        return encode_failure("MalformedJson", e.what());
    } catch (const std::exception &e) {
        return encode_failure("Internal", e.what());
    }
}

void consume(std::string result, const std::string &file, std::ostream &out,
             ExportSummary &summary) {
    if (!result.empty() && result.front() == kFailureMarker) {
        const auto nl = result.find('\n');
        summary.failures.push_back(
            {file, result.substr(1, nl - 1), result.substr(nl + 1)});
        return;
    }
    out << result << '\n';
    ++summary.succeeded;
}

} // namespace

ExportSummary export_corpus(const std::vector<std::filesystem::path> &inputs,
                            const PipelineConfig &config, std::ostream &out, int jobs) {
    config.validate();
    ExportSummary summary;
    ordered_parallel(
        inputs.size(), jobs,
        [&](size_t i) {
            return guarded([&] {
                const auto loaded = load_structure(inputs[i]);
                return graph_record(build_graph(loaded, config)).dump();
            });
        },
        [&](size_t i, std::string result) {
            consume(std::move(result), inputs[i].generic_string(), out, summary);
        });
    return summary;
}

std::string failure_report(const std::vector<ExportFailure> &failures) {
    std::string text;
    for (const auto &f : failures) {
        nlohmann::ordered_json j;
        j["file"] = f.file;
        j["kind"] = f.kind;
        j["message"] = f.message;
        text += j.dump() + '\n';
    }
    return text;
}

ExportSummary forward_ndjson(std::istream &in, const NgnConfig &config, std::ostream &out,
                             int jobs) {
    const auto params = init_params(config);
    const auto config_hash = config.hash();
    const auto checksum = params.checksum();
    std::vector<std::string> lines;
    std::vector<size_t> line_numbers;
    size_t number = 0;
    for (std::string line; std::getline(in, line);) {
        ++number;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            lines.push_back(std::move(line));
            line_numbers.push_back(number);
        }
    }

    ExportSummary summary;
    ordered_parallel(
        lines.size(), jobs,
        [&](size_t i) {
            return guarded([&] {
                const auto record = nlohmann::json::parse(lines[i]);
                const auto graph = graph_from_json(record);
                const auto lg = line_graph_from_json(record, graph.num_edges());
                const auto result = forward(graph, lg ? &*lg : nullptr, config, params);
                nlohmann::ordered_json j;
                j["id"] = graph.id;
                j["kind"] = std::string(to_string(graph.kind));
                j["prediction"] = result.prediction;
                j["config_hash"] = config_hash;
                j["params_checksum"] = checksum;
                return j.dump();
            });
        },
        [&](size_t i, std::string result) {
            consume(std::move(result), "line " + std::to_string(line_numbers[i]), out, summary);
        });
    return summary;
}

} // namespace crystgraph
