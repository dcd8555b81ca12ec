// signfj: Friedkin-Johnsen opinion dynamics on signed graphs.
// Subcommands: quantify, optimize, minimize, walks, centrality, gen-opinions.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "signfj/signfj.hpp"
#include "json_out.hpp"

namespace {

using namespace signfj;
using tools::JsonWriter;
using tools::fmt17;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CommonConfig {
    std::string graph_path;
    std::string opinions = "uniform"; // file:PATH | uniform | exp | powerlaw
    double epsilon = 1e-5;
    std::uint64_t seed = 1;
    double flip_probability = 0.0;
    bool exact = false;
    int workers = 0; // 0 = available parallelism
    std::string output = "json";
};

void add_common_options(CLI::App& cmd, CommonConfig& cfg, bool needs_opinions) {
    cmd.add_option("--graph", cfg.graph_path, "edge-list file (u v [+1|-1] per line, # comments)")
        ->required()
        ->envname("SIGNFJ_GRAPH");
    if (needs_opinions) {
        cmd.add_option("--opinions", cfg.opinions, "file:PATH | uniform | exp | powerlaw")
            ->envname("SIGNFJ_OPINIONS");
    }
    cmd.add_option("--epsilon", cfg.epsilon, "approximation parameter")->envname("SIGNFJ_EPSILON");
    cmd.add_option("--seed", cfg.seed, "seed for all randomized choices")->envname("SIGNFJ_SEED");
    cmd.add_option("--flip-prob", cfg.flip_probability, "set each edge sign to -1 with this probability")
        ->envname("SIGNFJ_FLIP_PROB");
    cmd.add_flag("--exact", cfg.exact, "force the dense path (also emitted next to approx where relevant)");
    cmd.add_option("--workers", cfg.workers, "worker threads; 1 guarantees deterministic output")
        ->envname("SIGNFJ_WORKERS");
    cmd.add_option("--output", cfg.output, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->envname("SIGNFJ_OUTPUT");
}

int effective_workers(const CommonConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

SignedGraph load_graph(const CommonConfig& cfg) {
    std::ifstream in(cfg.graph_path);
    if (!in) throw ParseError("cannot open graph file `" + cfg.graph_path + "`");
    LoadOptions options;
    options.flip_probability = cfg.flip_probability;
    options.seed = cfg.seed;
    SignedGraph g = SignedGraph::load_edge_list(in, options);
    if (!g.connected()) {
        std::cerr << "warning: graph is not connected; all quantities remain well-defined\n";
    }
    return g;
}

std::vector<double> read_opinion_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open opinions file `" + path + "`");
    std::vector<double> s;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            s.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ParseError("opinions file line " + std::to_string(line_no) + ": not a number: " + line);
        }
    }
    if (static_cast<int>(s.size()) != n) {
        throw ParseError("opinions file has " + std::to_string(s.size()) + " values, graph has " +
                         std::to_string(n) + " nodes");
    }
    return s;
}

std::vector<double> acquire_opinions(const CommonConfig& cfg, const SignedGraph& g) {
    if (cfg.opinions.rfind("file:", 0) == 0) {
        return read_opinion_file(cfg.opinions.substr(5), g.node_count());
    }
    return gen_opinions(g.node_count(), parse_distribution(cfg.opinions), cfg.seed);
}

void write_provenance(JsonWriter& json, const CommonConfig& cfg, const SignedGraph& g) {
    json.kv("version", kVersion);
    json.key("graph").begin_object();
    json.kv("n", g.node_count());
    json.kv("m", g.edge_count());
    json.kv("negative_edges", g.negative_edge_count());
    json.kv("connected", g.connected());
    json.end_object();
    json.key("config").begin_object();
    json.kv("graph", cfg.graph_path);
    json.kv("opinions", cfg.opinions);
    json.kv("epsilon", cfg.epsilon);
    json.kv("seed", cfg.seed);
    json.kv("flip_prob", cfg.flip_probability);
    json.kv("exact", cfg.exact);
    json.end_object();
}

void write_phenomena(JsonWriter& json, const PhenomenaReport& r, std::span<const double> s) {
    const auto [r1, r2] = conservation_residuals(r, s);
    json.begin_object();
    json.kv("I", r.internal_conflict);
    json.kv("D", r.disagreement);
    json.kv("F", r.friend_disagreement);
    json.kv("E", r.opponent_agreement);
    json.kv("P", r.polarization);
    json.kv("method", r.method == QuantifyMethod::Exact ? "exact" : "approx");
    if (r.method == QuantifyMethod::Approx) {
        json.kv("epsilon", r.epsilon);
        json.kv("delta", r.delta);
        if (r.delta_requested != r.delta) json.kv("delta_requested", r.delta_requested);
    }
    json.key("conservation").begin_object();
    json.kv("r1", r1);
    json.kv("r2", r2);
    json.end_object();
    json.end_object();
}

double report_value(const PhenomenaReport& r, int idx) {
    switch (idx) {
        case 0: return r.internal_conflict;
        case 1: return r.disagreement;
        case 2: return r.friend_disagreement;
        case 3: return r.opponent_agreement;
        default: return r.polarization;
    }
}

constexpr const char* kQuantityNames[5] = {"I", "D", "F", "E", "P"};

double relative_error(double exact, double approx) {
    if (exact != 0.0) return std::abs(approx - exact) / std::abs(exact);
    return std::abs(approx - exact);
}

int run_quantify(const CommonConfig& cfg) {
    const SignedGraph g = load_graph(cfg);
    const std::vector<double> s = acquire_opinions(cfg, g);

    const PhenomenaReport approx = approx_quantities(g, s, cfg.epsilon);
    std::optional<PhenomenaReport> exact;
    if (cfg.exact) exact = exact_quantities(g, s);

    if (cfg.output == "csv") {
        std::cout << "quantity,approx";
        if (exact) std::cout << ",exact,relative_error";
        std::cout << "\n";
        for (int i = 0; i < 5; ++i) {
            std::cout << kQuantityNames[i] << "," << fmt17(report_value(approx, i));
            if (exact) {
                const double e = report_value(*exact, i);
                std::cout << "," << fmt17(e) << "," << fmt17(relative_error(e, report_value(approx, i)));
            }
            std::cout << "\n";
        }
        return 0;
    }

    JsonWriter json(std::cout);
    json.begin_object();
    write_provenance(json, cfg, g);
    json.key("approx");
    write_phenomena(json, approx, s);
    if (exact) {
        json.key("exact");
        write_phenomena(json, *exact, s);
        json.key("relative_error").begin_object();
        for (int i = 0; i < 5; ++i) {
            json.kv(kQuantityNames[i], relative_error(report_value(*exact, i), report_value(approx, i)));
        }
        json.end_object();
    }
    json.end_object();
    std::cout << "\n";
    return 0;
}

void write_optimization(JsonWriter& json, const OptimizationResult& r) {
    json.begin_object();
    json.key("selected").begin_array();
    for (int i : r.selected) json.value(i);
    json.end_array();
    json.key("gains").begin_array();
    for (double gain : r.gains) json.value(gain);
    json.end_array();
    json.kv("g_before", r.overall_before);
    json.kv("g_after", r.overall_after);
    json.kv("method", to_string(r.method));
    json.kv("k", r.k);
    if (r.method == OptimizeMethod::Approx) json.kv("epsilon", r.epsilon);
    if (r.delta != 0.0) json.kv("delta", r.delta);
    json.kv("exact_objective", r.exact_objective);
    json.end_object();
}

int run_optimize(const CommonConfig& cfg, int k, bool with_baselines, const std::string& write_opinions,
                 bool minimize) {
    const SignedGraph g = load_graph(cfg);
    const std::vector<double> s = acquire_opinions(cfg, g);

    auto solve = [&](auto&&... mode) {
        return minimize ? optimize_min(g, s, k, mode...) : optimize_max(g, s, k, mode...);
    };
    const OptimizationResult result = cfg.exact ? solve() : solve(cfg.epsilon);

    if (!write_opinions.empty()) {
        std::ofstream out(write_opinions);
        if (!out) throw ParseError("cannot open `" + write_opinions + "` for writing");
        for (double y : result.modified_opinions) out << fmt17(y) << "\n";
    }

    if (cfg.output == "csv") {
        std::cout << "rank,node,gain\n";
        for (size_t i = 0; i < result.selected.size(); ++i) {
            std::cout << i + 1 << "," << result.selected[i] << "," << fmt17(result.gains[i]) << "\n";
        }
        std::cout << "# g_before," << fmt17(result.overall_before) << "\n";
        std::cout << "# g_after," << fmt17(result.overall_after) << "\n";
        return 0;
    }

    JsonWriter json(std::cout);
    json.begin_object();
    write_provenance(json, cfg, g);
    json.key("result");
    write_optimization(json, result);
    if (with_baselines) {
        json.key("baselines").begin_array();
        for (BaselineKind kind : {BaselineKind::Rand, BaselineKind::Trust, BaselineKind::InternalOpinion,
                                  BaselineKind::ExpressedOpinion}) {
            OptimizationResult b = baseline_opinion_max(g, s, k, kind, cfg.seed, cfg.epsilon);
            if (minimize) {
                // Baselines are defined for the max problem; report them on
                // the same objective the main result uses.
                b.overall_before = -b.overall_before;
                b.overall_after = -b.overall_after;
            }
            write_optimization(json, b);
        }
        json.end_array();
    }
    json.end_object();
    std::cout << "\n";
    return 0;
}

int run_walks(const CommonConfig& cfg, int source, std::int64_t walks) {
    const SignedGraph g = load_graph(cfg);
    if (source < 0 || source >= g.node_count()) {
        throw ParseError("walk source " + std::to_string(source) + " out of range");
    }
    const WalkEstimate est = estimate_pq(g, source, walks, cfg.seed, effective_workers(cfg));
    const std::vector<double> p_hat = est.p_hat();
    const std::vector<double> q_hat = est.q_hat();

    std::optional<std::pair<std::vector<double>, std::vector<double>>> exact;
    if (g.node_count() <= kDenseLimit) exact = exact_pq_row(g, source);

    if (cfg.output == "json") {
        JsonWriter json(std::cout);
        json.begin_object();
        write_provenance(json, cfg, g);
        json.kv("source", source);
        json.kv("walks", walks);
        json.key("p_hat").begin_array();
        for (double v : p_hat) json.value(v);
        json.end_array();
        json.key("q_hat").begin_array();
        for (double v : q_hat) json.value(v);
        json.end_array();
        json.end_object();
        std::cout << "\n";
        return 0;
    }

    std::cout << "j,p_hat,q_hat";
    if (exact) std::cout << ",p_exact,q_exact";
    std::cout << "\n";
    for (int j = 0; j < g.node_count(); ++j) {
        std::cout << j << "," << fmt17(p_hat[static_cast<size_t>(j)]) << ","
                  << fmt17(q_hat[static_cast<size_t>(j)]);
        if (exact) {
            std::cout << "," << fmt17(exact->first[static_cast<size_t>(j)]) << ","
                      << fmt17(exact->second[static_cast<size_t>(j)]);
        }
        std::cout << "\n";
    }
    return 0;
}

int run_centrality(const CommonConfig& cfg, int k) {
    const SignedGraph g = load_graph(cfg);
    const CentralityVector c =
        cfg.exact ? structure_centrality(g) : structure_centrality_approx(g, k, cfg.epsilon);

    if (cfg.output == "csv") {
        std::cout << "node,h\n";
        for (size_t i = 0; i < c.values.size(); ++i) std::cout << i << "," << fmt17(c.values[i]) << "\n";
        return 0;
    }
    JsonWriter json(std::cout);
    json.begin_object();
    write_provenance(json, cfg, g);
    json.kv("method", c.mode == CentralityMode::Exact ? "exact" : "approx");
    if (c.mode == CentralityMode::Approx) json.kv("delta", c.delta);
    json.key("h").begin_array();
    for (double v : c.values) json.value(v);
    json.end_array();
    json.end_object();
    std::cout << "\n";
    return 0;
}

int run_gen_opinions(int n, const std::string& dist, std::uint64_t seed, const std::string& out_path) {
    const std::vector<double> s = gen_opinions(n, parse_distribution(dist), seed);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ParseError("cannot open `" + out_path + "` for writing");
        out = &file;
    }
    for (double v : s) *out << fmt17(v) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Friedkin-Johnsen opinion dynamics on signed graphs"};
    app.set_version_flag("--version", std::string("signfj ") + signfj::kVersion);
    app.require_subcommand(1);

    CommonConfig cfg;
    int k = 1;
    int source = 0;
    std::int64_t walks = 100000;
    bool with_baselines = false;
    std::string write_opinions;
    int gen_n = 0;
    std::string gen_dist = "uniform";
    std::uint64_t gen_seed = 1;
    std::string gen_out;

    CLI::App* quantify = app.add_subcommand("quantify", "conflict/disagreement/polarization report");
    add_common_options(*quantify, cfg, true);

    CLI::App* optimize = app.add_subcommand("optimize", "maximize the overall opinion by changing k opinions");
    add_common_options(*optimize, cfg, true);
    optimize->add_option("--k", k, "number of nodes to change")->required()->check(CLI::PositiveNumber);
    optimize->add_flag("--baselines", with_baselines, "also report rand/trust/io/eo baselines");
    optimize->add_option("--write-opinions", write_opinions, "write the modified opinion vector to a file");

    CLI::App* minimize = app.add_subcommand("minimize", "minimize the overall opinion by changing k opinions");
    add_common_options(*minimize, cfg, true);
    minimize->add_option("--k", k, "number of nodes to change")->required()->check(CLI::PositiveNumber);
    minimize->add_flag("--baselines", with_baselines, "also report rand/trust/io/eo baselines");
    minimize->add_option("--write-opinions", write_opinions, "write the modified opinion vector to a file");

    CLI::App* walks_cmd = app.add_subcommand("walks", "Monte Carlo absorbing-walk estimates of p and q");
    add_common_options(*walks_cmd, cfg, false);
    walks_cmd->add_option("--source", source, "walk start node (dense id)");
    walks_cmd->add_option("--walks", walks, "number of walks")->check(CLI::PositiveNumber);

    CLI::App* centrality = app.add_subcommand("centrality", "structure centrality h = (I+L)^-1 1");
    add_common_options(*centrality, cfg, false);
    centrality->add_option("--k", k, "k used in the approx tolerance");

    CLI::App* gen = app.add_subcommand("gen-opinions", "generate a seeded opinion vector");
    gen->add_option("--n", gen_n, "vector length")->required()->check(CLI::PositiveNumber);
    gen->add_option("--dist", gen_dist, "uniform | exp | powerlaw");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // walks defaults to CSV per its interface; everything else to JSON.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    if (walks_cmd->parsed() && walks_cmd->count("--output") == 0) cfg.output = "csv";

    try {
        if (quantify->parsed()) return run_quantify(cfg);
        if (optimize->parsed()) return run_optimize(cfg, k, with_baselines, write_opinions, false);
        if (minimize->parsed()) return run_optimize(cfg, k, with_baselines, write_opinions, true);
        if (walks_cmd->parsed()) return run_walks(cfg, source, walks);
        if (centrality->parsed()) return run_centrality(cfg, k);
        if (gen->parsed()) return run_gen_opinions(gen_n, gen_dist, gen_seed, gen_out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SolveFailure& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DenseLimitError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
