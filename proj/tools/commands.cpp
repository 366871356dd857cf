#include "commands.hpp"

#include "demos.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace conlab::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Schema:
        case ErrorCode::SelfLoop:
        case ErrorCode::DuplicateEdge:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::InvalidCoupling:
        case ErrorCode::NonFinite:
            return ExitSchema;
        case ErrorCode::Disconnected: return ExitDisconnected;
        case ErrorCode::CombinatorialBlowup: return ExitBlowup;
        default: return ExitFailure;
    }
}

std::string block_summary(const BlockDecomposition& dec) {
    // Bridges sharing a node belong to the same tree motif.
    const auto count = dec.blocks.size();
    std::vector<std::size_t> parent(count);
    for (std::size_t i = 0; i < count; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<int, std::size_t> bridge_at;
    for (std::size_t b = 0; b < count; ++b) {
        if (dec.blocks[b].kind != BlockKind::TreeEdge) continue;
        for (int v : dec.blocks[b].nodes) {
            const auto [it, fresh] = bridge_at.emplace(v, b);
            if (!fresh) parent[find(b)] = find(it->second);
        }
    }
    std::vector<std::string> motifs;
    std::map<std::size_t, int> tree_sizes;
    for (std::size_t b = 0; b < count; ++b)
        if (dec.blocks[b].kind == BlockKind::TreeEdge) ++tree_sizes[find(b)];
    for (std::size_t b = 0; b < count; ++b) {
        const Block& blk = dec.blocks[b];
        if (blk.kind == BlockKind::TreeEdge) {
            // the group is listed where its first bridge appears
            bool first = true;
            for (std::size_t o = 0; o < b; ++o)
                if (dec.blocks[o].kind == BlockKind::TreeEdge && find(o) == find(b)) first = false;
            if (first) motifs.push_back(std::to_string(tree_sizes[find(b)]) + "×TreeEdge");
        } else {
            motifs.push_back(std::string(to_string(blk.kind)) + "(" + std::to_string(blk.nodes.size()) + ")");
        }
    }
    std::string out = std::to_string(motifs.size()) + (motifs.size() == 1 ? " block: " : " blocks: ");
    for (std::size_t i = 0; i < motifs.size(); ++i) out += (i ? ", " : "") + motifs[i];
    if (!dec.cut_nodes.empty()) {
        out += "; cut-nodes ";
        for (std::size_t i = 0; i < dec.cut_nodes.size(); ++i) out += (i ? "," : "") + std::to_string(dec.cut_nodes[i] + 1);
    }
    return out;
}

namespace {

std::vector<Equilibrium> clique_forms(const System& s, const std::vector<double>& positive, const GlobalOptions& options) {
    const int n = s.node_count();
    const double subsets = std::ldexp(1.0, n) - 2.0;
    if (subsets * static_cast<double>(positive.size()) > options.max_states) {
        throw Error(ErrorCode::CombinatorialBlowup, "clique forms on K" + std::to_string(n));
    }
    std::vector<Equilibrium> out{make_equilibrium(s, Eigen::VectorXd::Zero(n), Provenance::CliqueForm)};
    out.front().n0 = n;
    for (double alpha : positive) {
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
            Eigen::VectorXd x(n);
            int n0 = 0;
            for (int i = 0; i < n; ++i) {
                const bool high = (mask >> i) & 1U;
                x(i) = high ? alpha : 0.0;
                n0 += high ? 0 : 1;
            }
            Equilibrium eq = make_equilibrium(s, x, Provenance::CliqueForm);
            eq.n0 = n0;
            eq.alpha = alpha;
            out.push_back(std::move(eq));
        }
    }
    return out;
}

}  // namespace

std::vector<Equilibrium> block_equilibria(const System& s, const GlobalOptions& options, int lambda_samples) {
    const Graph& g = s.graph();
    const bool uniform_poly = s.assignment().is_uniform() && s.coupling(0).is_polynomial();
    std::vector<Equilibrium> out;
    if (g.is_cycle() && uniform_poly && lambda_samples > 0) {
        const CycleFamilyResult fam = cycle_family(s, options.root_bound);
        if (fam.family) {
            for (auto& eq : fam.family->sample(lambda_samples)) out.push_back(std::move(eq));
        }
    }
    EnumerationOptions en;
    en.bound = options.root_bound;
    en.max_states = options.max_states;
    if (g.is_complete() && g.node_count() >= 4 && s.assignment().is_uniform()) {
        const auto positive = positive_roots(roots(s.coupling(0), options.root_bound));
        if (is_additive_open(positive)) {
            for (auto& eq : clique_forms(s, positive, options)) out.push_back(std::move(eq));
            return deduplicate(std::move(out));
        }
    }
    for (auto& eq : detailed_balance(s, en)) out.push_back(std::move(eq));
    return deduplicate(std::move(out));
}

std::vector<Equilibrium> enumerate_equilibria(const System& s, const GlobalOptions& options, int lambda_samples) {
    const Graph& g = s.graph();
    g.require_connected("equilibrium enumeration");
    if (g.node_count() < 2) return {make_equilibrium(s, Eigen::VectorXd::Zero(g.node_count()))};
    const BlockDecomposition dec = block_decomposition(g);
    if (dec.blocks.size() == 1) return block_equilibria(s, options, lambda_samples);

    std::vector<std::vector<Eigen::VectorXd>> values;
    for (const Block& blk : dec.blocks) {
        const Subgraph sub = extract_block(g, blk);
        std::vector<Eigen::VectorXd> ys;
        for (const auto& eq : block_equilibria(block_system(s, sub), options, lambda_samples)) ys.push_back(eq.y);
        values.push_back(std::move(ys));
    }
    const CoalescenceProduct product = compose_coalescence(g, dec, std::move(values));
    if (static_cast<double>(product.count()) > options.max_states) {
        throw Error(ErrorCode::CombinatorialBlowup,
                    "block product has " + std::to_string(product.count()) + " states, limit " + format_number(options.max_states));
    }
    std::vector<Equilibrium> out;
    out.reserve(static_cast<std::size_t>(product.count()));
    for (std::uint64_t i = 0; i < product.count(); ++i) out.push_back(product.equilibrium(s, i));
    return out;
}

std::vector<StabilityVerdict> classify_all(const System& s, const std::vector<Equilibrium>& list,
                                           const ClassifyOptions& options, int jobs) {
    std::vector<StabilityVerdict> out(list.size());
    std::vector<std::exception_ptr> errors(list.size());
    const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(list.size()))));
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < list.size(); i += workers) {
            try {
                out[i] = classify(s, list[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

struct Common {
    GlobalOptions global;
    std::string spec;
};

ClassifyOptions classify_options(const GlobalOptions& g) {
    ClassifyOptions c;
    c.tol_zero = g.tol_zero;
    c.root_bound = g.root_bound;
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Schema, "cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Eigen::VectorXd vector_from_json(const Json& j, int n, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw Error(ErrorCode::Schema, what + ": expected an array of " + std::to_string(n) + " numbers");
    }
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) throw Error(ErrorCode::Schema, what + ": non-numeric entry");
        x(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return x;
}

int cmd_analyze(const Common& c, const std::string& dot_path, std::ostream& out) {
    const Json spec = load_json(c.spec);
    const Graph g = graph_from_json(spec.contains("graph") ? spec.at("graph") : spec);
    out << "nodes " << g.node_count() << ", edges " << g.edge_count() << ", components " << g.component_count() << '\n';
    g.require_connected("analyze");
    out << "cycle space dimension " << g.edge_count() - g.node_count() + 1 << ", cut space dimension "
        << g.node_count() - 1 << '\n';
    const BlockDecomposition dec = block_decomposition(g);
    out << block_summary(dec) << '\n';
    for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
        out << "  block " << b + 1 << ' ' << to_string(dec.blocks[b].kind) << " nodes";
        for (std::size_t i = 0; i < dec.blocks[b].nodes.size(); ++i) out << (i ? "," : " ") << dec.blocks[b].nodes[i] + 1;
        out << '\n';
    }
    if (spec.contains("coupling")) {
        const System s = system_from_json(spec);
        if (s.assignment().is_uniform()) {
            const auto& f = s.coupling(0);
            const auto rs = roots(f, c.global.root_bound);
            out << "coupling " << f.describe() << ", roots in [-" << format_number(c.global.root_bound) << ","
                << format_number(c.global.root_bound) << "]:";
            for (double r : rs) out << ' ' << format_number(r);
            out << '\n';
            for (const auto& w : degenerate_root_warnings(f, rs)) out << w << '\n';
        }
        out << "boundedness " << to_string(boundedness_certificate(s)) << '\n';
        out << "consensus only " << (consensus_only_check(s, c.global.root_bound) ? "yes" : "no") << '\n';
    }
    if (!dot_path.empty()) write_text(dot_path, to_dot(g, &dec));
    return ExitOk;
}

int cmd_equilibria(const Common& c, int lambda_samples, const std::string& out_path, std::ostream& out) {
    const System s = system_from_json(load_json(c.spec));
    const auto list = enumerate_equilibria(s, c.global, lambda_samples);
    const std::string csv = equilibria_csv(list, s.node_count(), s.edge_count());
    if (out_path.empty()) out << csv;
    else write_text(out_path, csv);
    return ExitOk;
}

int cmd_classify(const Common& c, const std::string& states_source, int lambda_samples, std::ostream& out,
                 std::ostream& err) {
    const Json spec = load_json(c.spec);
    const System s = system_from_json(spec);
    std::vector<Equilibrium> list;
    if (!states_source.empty()) {
        const auto first = states_source.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && states_source[first] == '[') {
            for (const auto& row : Json::parse(states_source)) list.push_back(make_equilibrium(s, vector_from_json(row, s.node_count(), "state")));
        } else {
            for (const auto& x : states_from_csv(read_text(states_source))) {
                if (x.size() != s.node_count()) throw Error(ErrorCode::Schema, "equilibria CSV width != node count");
                list.push_back(make_equilibrium(s, x));
            }
        }
    } else if (spec.contains("equilibria")) {
        for (const auto& row : spec.at("equilibria")) list.push_back(make_equilibrium(s, vector_from_json(row, s.node_count(), "equilibria")));
    } else {
        list = enumerate_equilibria(s, c.global, lambda_samples);
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].residual > 1e-8) {
            err << "error: state " << i + 1 << " has residual " << format_number(list[i].residual) << " > 1e-8\n";
            return ExitResidual;
        }
    }
    const auto verdicts = classify_all(s, list, classify_options(c.global), c.global.jobs);
    Json results = Json::array();
    for (std::size_t i = 0; i < list.size(); ++i) {
        Json r = verdict_to_json(verdicts[i]);
        r.erase("schema");
        r["index"] = i;
        r["provenance"] = list[i].label();
        r["x"] = std::vector<double>(list[i].x.data(), list[i].x.data() + list[i].x.size());
        results.push_back(std::move(r));
    }
    out << Json{{"schema", schema_tag}, {"results", results}}.dump(2) << '\n';
    return ExitOk;
}

struct SimulateArgs {
    std::string x0;
    bool random = false;
    unsigned long long seed = 1;
    double t_end = 10.0;
    double dt = 1e-3;
    int sample_every = 10;
    std::string out_path;
    std::string summary_path;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const Json spec = load_json(c.spec);
    const System s = system_from_json(spec);
    const int n = s.node_count();
    Eigen::VectorXd x0;
    if (a.random) {
        std::mt19937_64 rng(a.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        x0.resize(n);
        for (int i = 0; i < n; ++i) x0(i) = u(rng);
    } else if (!a.x0.empty()) {
        x0 = vector_from_json(load_json(a.x0), n, "x0");
    } else if (spec.contains("x0")) {
        x0 = vector_from_json(spec.at("x0"), n, "x0");
    } else {
        throw Error(ErrorCode::Schema, "simulate needs x0 (--x0, \"x0\" in the spec, or --random)");
    }
    IntegrateOptions io;
    io.dt = a.dt;
    io.sample_every = a.sample_every;
    const Trajectory tr = integrate(s, x0, a.t_end, io);
    const Eigen::VectorXd final_state = tr.final_state();
    const Eigen::VectorXd centered = mean_zero(final_state);

    Json summary{{"schema", schema_tag},
                 {"t_final", tr.t.back()},
                 {"samples", tr.t.size()},
                 {"blew_up", tr.blew_up},
                 {"max_mean_drift", tr.max_mean_drift},
                 {"max_mean_drift_ratio", tr.max_mean_drift_ratio},
                 {"potential_tracked", tr.potential_tracked},
                 {"max_potential_increase", tr.max_potential_increase},
                 {"terminal_residual", final_state.allFinite() ? vector_field(s, final_state).norm() : -1.0},
                 {"terminal_radius", centered.norm()},
                 {"nearest_equilibrium", nullptr}};
    if (!tr.blew_up) {
        try {
            const auto known = enumerate_equilibria(s, c.global, 20);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& eq : known) {
                const double d = (eq.x - centered).norm();
                if (d < best) {
                    best = d;
                    summary["nearest_equilibrium"] = {{"provenance", eq.label()}, {"distance", d},
                                                      {"x", std::vector<double>(eq.x.data(), eq.x.data() + n)}};
                }
            }
        } catch (const Error& e) {
            summary["nearest_equilibrium_error"] = e.what();
        }
    }
    const std::string csv = trajectory_csv(tr);
    const std::string text = summary.dump(2) + "\n";
    if (!a.summary_path.empty()) write_text(a.summary_path, text);
    if (a.out_path.empty()) {
        out << csv;
        err << text;
    } else {
        write_text(a.out_path, csv);
        out << text;
    }
    if (tr.blew_up) {
        err << "error: trajectory blew up at t = " << format_number(tr.t.back()) << '\n';
        return ExitSimulationBlowup;
    }
    return ExitOk;
}

int cmd_demo(const std::string& name, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const DemoReport report = run_demo(name);
    const std::string dir = out_dir.empty() ? "demo-" + name : out_dir;
    write_artifacts(report, dir);
    for (const auto& check : report.checks) {
        out << (check.ok ? "[ok]   " : "[FAIL] ") << check.name << ": " << check.got << '\n';
        if (!check.ok) err << "--- expected " << check.expected << "\n+++ got      " << check.got << '\n';
    }
    out << report.name << ": " << report.checks.size() << " checks, artifacts in " << dir << '\n';
    return report.passed() ? ExitOk : ExitDemoFailed;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlinear consensus networks: equilibria, stability criteria and simulation"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--tol-zero", c.global.tol_zero, "relative zero-eigenvalue tolerance")->capture_default_str();
    app.add_option("--root-bound", c.global.root_bound, "roots are searched in [-bound, bound]")->capture_default_str();
    app.add_option("--max-states", c.global.max_states, "cap on enumerated states")->capture_default_str();
    app.add_option("--jobs", c.global.jobs, "worker threads for classification")->check(CLI::PositiveNumber)->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "graph statistics and block decomposition");
    std::string dot_path;
    analyze->add_option("--spec", c.spec, "spec JSON (inline or path); a bare graph is accepted")->required();
    analyze->add_option("--dot", dot_path, "write DOT with block colors");

    auto* equilibria = app.add_subcommand("equilibria", "enumerate equilibria as CSV");
    int lambda_samples = 5;
    std::string eq_out;
    equilibria->add_option("--spec", c.spec, "spec JSON (inline or path)")->required();
    equilibria->add_option("--lambda-samples", lambda_samples, "members sampled per cycle family")->capture_default_str();
    equilibria->add_option("--out", eq_out, "CSV path (default stdout)");

    auto* classify_cmd = app.add_subcommand("classify", "stability verdicts as JSON");
    std::string states;
    classify_cmd->add_option("--spec", c.spec, "spec JSON (inline or path)")->required();
    classify_cmd->add_option("--states", states,
                             "equilibria CSV path or inline JSON array of states; default: spec \"equilibria\" or enumeration");
    classify_cmd->add_option("--lambda-samples", lambda_samples, "members sampled per cycle family")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "RK4 trajectory CSV and summary");
    SimulateArgs sim;
    simulate->add_option("--spec", c.spec, "spec JSON (inline or path)")->required();
    simulate->add_option("--x0", sim.x0, "initial state as a JSON array");
    simulate->add_flag("--random", sim.random, "uniform random x0 in [-1,1]^n");
    simulate->add_option("--seed", sim.seed, "seed for --random")->capture_default_str();
    simulate->add_option("--t-end", sim.t_end, "final time")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "step size")->capture_default_str();
    simulate->add_option("--sample-every", sim.sample_every, "steps between rows")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--out", sim.out_path, "trajectory CSV path (default stdout, summary to stderr)");
    simulate->add_option("--summary", sim.summary_path, "also write the summary JSON here");

    auto* demo = app.add_subcommand("demo", "reproduce a worked computation and check it");
    std::string demo_name;
    std::string demo_dir;
    demo->add_option("name", demo_name, "demo name")->required()->check(CLI::IsMember(demo_names()));
    demo->add_option("--out-dir", demo_dir, "artifact directory (default demo-<name>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitOk : ExitSchema;
    }

    try {
        if (*analyze) return cmd_analyze(c, dot_path, out);
        if (*equilibria) return cmd_equilibria(c, lambda_samples, eq_out, out);
        if (*classify_cmd) return cmd_classify(c, states, lambda_samples, out, err);
        if (*simulate) return cmd_simulate(c, sim, out, err);
        if (*demo) return cmd_demo(demo_name, demo_dir, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const Json::exception& e) {
        err << "error: Schema: " << e.what() << '\n';
        return ExitSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ExitFailure;
    }
    return ExitFailure;
}

}  // namespace conlab::cli
