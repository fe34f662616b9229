// Command-line front end: simulate / exact / reconstruct / verify / metrics.
//
// Every output file is byte-deterministic for a fixed config and seed;
// wall-clock timings go to stderr only.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fptrec/control.hpp"
#include "fptrec/errors.hpp"
#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/heat.hpp"
#include "fptrec/io.hpp"
#include "fptrec/linalg.hpp"
#include "fptrec/metrics.hpp"

namespace {

using namespace fptrec;

struct Options {
    std::string graph_path;
    std::optional<int> T;
    long long samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::string tol_mode = "relative";
    std::string mode = "mc";
    std::string data_path;
    std::string recovered_path;
    std::string out_dir;
};

class PhaseClock {
  public:
    void mark(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        if (!phases_.empty() || started_) {
            const double ms =
                std::chrono::duration<double, std::milli>(now - last_).count();
            phases_.emplace_back(pending_, ms);
        }
        pending_ = name;
        last_ = now;
        started_ = true;
    }

    /// Timings are console-only: output files must not depend on the clock.
    void report() const {
        auto total = 0.0;
        std::cerr << "timing(ms):";
        for (const auto& [name, ms] : phases_) {
            std::cerr << ' ' << name << '=' << static_cast<long long>(ms + 0.5);
            total += ms;
        }
        std::cerr << " total=" << static_cast<long long>(total + 0.5) << "\n";
    }

  private:
    std::vector<std::pair<std::string, double>> phases_;
    std::string pending_;
    std::chrono::steady_clock::time_point last_;
    bool started_ = false;
};

linalg::TolMode parse_tol_mode(const std::string& s) {
    if (s == "relative") return linalg::TolMode::Relative;
    if (s == "absolute") return linalg::TolMode::Absolute;
    throw ValidationError("unknown tol mode: " + s + " (want relative|absolute)");
}

int resolve_horizon(const Options& opt, const graph::Graph& g,
                    std::optional<int> data_horizon = std::nullopt) {
    int T = 0;
    if (opt.T)
        T = *opt.T;
    else if (g.horizon())
        T = *g.horizon();
    else if (data_horizon)
        T = *data_horizon;
    else
        throw ValidationError("no horizon: pass --T or record T in the graph file");
    if (T < 2) throw ValidationError("horizon must be at least 2");
    return T;
}

std::filesystem::path prepare_out(const Options& opt) {
    if (opt.out_dir.empty()) throw ValidationError("--out directory is required");
    std::filesystem::path dir(opt.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + opt.out_dir);
    return dir;
}

graph::VertexFunction truth_on_domain(const graph::Graph& g, graph::Domain d) {
    const std::size_t lo = d == graph::Domain::Boundary ? g.interior_size() : 0;
    graph::VertexFunction truth{d, linalg::Vector(g.domain_size(d))};
    for (std::size_t i = 0; i < truth.values.size(); ++i) truth.values[i] = g.mu(lo + i);
    return truth;
}

int cmd_simulate(const Options& opt) {
    if (opt.mode != "mc")
        throw ValidationError("simulate requires monte-carlo mode");
    if (opt.samples < 1) throw ValidationError("--samples must be at least 1");

    PhaseClock clock;
    clock.mark("load");
    const graph::Graph g = graph::Graph::from_json_file(opt.graph_path);
    const int T = resolve_horizon(opt, g);
    const auto dir = prepare_out(opt);

    clock.mark("walk");
    fpt::McConfig cfg;
    cfg.samples_per_pair = opt.samples;
    cfg.seed = opt.seed;
    cfg.horizon = T;
    const fpt::FptTensor r = fpt::mc_fpt(g, cfg);

    clock.mark("write");
    io::write_tensor_csv((dir / "r.csv").string(), r, g);
    clock.mark("");
    clock.report();

    std::cout << "wrote " << (dir / "r.csv").string() << " (" << r.side() << "x"
              << r.side() << " pairs, horizon " << T << ", " << opt.samples
              << " walks per pair, seed " << opt.seed << ")\n";
    return 0;
}

int cmd_exact(const Options& opt) {
    PhaseClock clock;
    clock.mark("load");
    const graph::Graph g = graph::Graph::from_json_file(opt.graph_path);
    const int T = resolve_horizon(opt, g);
    const auto dir = prepare_out(opt);

    clock.mark("recursion");
    const fpt::FptTensor r = fpt::exact_fpt(g, T, fpt::TensorDomain::BoundaryByBoundary);

    clock.mark("write");
    io::write_tensor_csv((dir / "r.csv").string(), r, g);
    clock.mark("");
    clock.report();

    std::cout << "wrote " << (dir / "r.csv").string() << " (" << r.side() << "x"
              << r.side() << " pairs, horizon " << T << ", exact)\n";
    return 0;
}

int cmd_reconstruct(const Options& opt) {
    PhaseClock clock;
    clock.mark("load");
    const graph::Graph g = graph::Graph::from_json_file(opt.graph_path);
    if (opt.data_path.empty())
        throw ValidationError("reconstruct needs --data (a tensor CSV)");
    const fpt::FptTensor r = io::read_tensor_csv(opt.data_path, g);
    const int T = resolve_horizon(opt, g, r.horizon);
    const auto dir = prepare_out(opt);

    // Simulated data is noisy at the 1/√N scale; exact data is not.
    const double tol = opt.tol ? *opt.tol : (r.samples ? 5e-4 : 1e-12);
    const linalg::TolMode mode = parse_tol_mode(opt.tol_mode);

    clock.mark("solve");
    const control::ReconstructionResult res = control::reconstruct_centrality(r, g, T, tol, mode);
    if (res.horizon_warning)
        std::cout << "warning: horizon " << T << " is shorter than the vertex count "
                  << g.size() << "\n";

    clock.mark("metrics");
    std::optional<metrics::MetricsReport> m;
    if (g.mu_known_everywhere() && g.interior_size() > 0) {
        const graph::VertexFunction truth = truth_on_domain(g, graph::Domain::Interior);
        if (r.samples) {
            const fpt::FptTensor exact =
                fpt::exact_fpt(g, T, fpt::TensorDomain::BoundaryByBoundary);
            m = metrics::compute_metrics(truth, res.mu_interior, &exact, &r);
        } else {
            m = metrics::compute_metrics(truth, res.mu_interior);
        }
    }

    clock.mark("write");
    io::write_report((dir / "report.txt").string(), g, res, T, m ? &*m : nullptr);
    io::write_vertex_csv((dir / "mu_recovered.csv").string(), g, res.mu_interior);
    io::write_singular_csv((dir / "singular_wstarw.csv").string(), res.sv_gram);
    io::write_singular_csv((dir / "singular_H.csv").string(), res.sv_products);
    if (m) io::write_metrics_csv((dir / "metrics.csv").string(), g, *m);
    clock.mark("");
    clock.report();

    std::cout << "rank of product system: " << res.rank_products << " / "
              << g.interior_size() << "\n";
    std::cout << "projection only: " << (res.projection_only ? "yes" : "no") << "\n";
    if (m) {
        if (m->frne_percent)
            std::cout << "frne_percent: " << io::format_float(*m->frne_percent) << "\n";
        std::cout << "l2rne_percent: " << io::format_float(m->l2rne_percent) << "\n";
    }
    std::cout << "wrote report.txt, mu_recovered.csv, singular_wstarw.csv, singular_H.csv"
              << (m ? ", metrics.csv" : "") << " to " << dir.string() << "\n";
    return 0;
}

int cmd_verify(const Options& opt) {
    const graph::Graph g = graph::Graph::from_json_file(opt.graph_path);
    const int T = resolve_horizon(opt, g);
    const double tol = opt.tol ? *opt.tol : 1e-12;
    const linalg::TolMode mode = parse_tol_mode(opt.tol_mode);

    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << "check " << name << ": " << (ok ? "pass" : "FAIL");
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };

    const graph::AssumptionReport assumptions = graph::check_assumptions(g);
    check("substochastic", assumptions.substochastic, "");
    check("unique-continuation", assumptions.unique_continuation,
          "margin " + io::format_float(assumptions.eigen_margin));
    if (!assumptions.substochastic) {
        std::cout << "remaining checks skipped: walk kernel undefined\n";
        return 1;
    }

    const fpt::FptTensor r = fpt::exact_fpt(g, T, fpt::TensorDomain::BoundaryByBoundary);

    double conservation = 0.0;
    for (std::size_t x = 0; x < r.side(); ++x)
        for (std::size_t y = 0; y < r.side(); ++y) {
            double total = r.escape(x, y);
            for (int t = 1; t <= r.max_time(); ++t) total += r.value(t, x, y);
            conservation = std::max(conservation, std::abs(total - 1.0));
        }
    check("probability-conservation", conservation <= 1e-12,
          "max deviation " + io::format_float(conservation));

    const double gram_dev = control::final_state_gram_deviation(g, r, 50, opt.seed);
    check("final-state-pairing", gram_dev <= 1e-10,
          "max deviation " + io::format_float(gram_dev));

    const linalg::Matrix lambda = heat::assemble_lambda(r, T);
    const double adj_dev = control::adjoint_deviation(lambda, g, T, 50, opt.seed);
    check("time-reversal-adjoint", adj_dev <= 1e-10,
          "max deviation " + io::format_float(adj_dev));

    const double ctrl_dev = control::control_target_deviation(g, r, tol, mode);
    check("control-targets", ctrl_dev <= 1e-6, "max deviation " + io::format_float(ctrl_dev));

    if (static_cast<std::size_t>(T) < g.size())
        std::cout << "note: horizon " << T << " < " << g.size()
                  << " vertices, final-state map cannot reach every state\n";
    const std::size_t rank_w = control::final_state_rank(g, T);
    check("final-state-surjectivity", rank_w == g.size(),
          "rank " + std::to_string(rank_w) + " of " + std::to_string(g.size()));

    const heat::OccupationTable occ = heat::occupation_renewal(r);
    double occ_dev = 0.0;
    const int t_cap = std::min(r.max_time(), 12);
    for (int t = 1; t <= t_cap; ++t)
        for (std::size_t x = 0; x < r.side(); ++x)
            for (std::size_t y = 0; y < r.side(); ++y)
                occ_dev = std::max(occ_dev, std::abs(occ.value(t, x, y) -
                                                     heat::occupation_naive(r, t, x, y)));
    check("occupation-equivalence", occ_dev <= 1e-12,
          "max deviation to t=" + std::to_string(t_cap) + ": " + io::format_float(occ_dev));

    const std::size_t ni = g.interior_size();
    const std::size_t capacity = g.boundary_size() * (g.boundary_size() + 1) / 2;
    if (capacity < ni)
        std::cout << "warning: observation set too small for full recovery ("
                  << g.boundary_size() << " vertices give " << capacity
                  << " products for " << ni << " unknowns)\n";

    const control::ReconstructionResult res = control::reconstruct_centrality(r, g, T, tol, mode);
    std::cout << "rank of product system: " << res.rank_products << " / " << ni << "\n";
    std::cout << "projection only: " << (res.projection_only ? "yes" : "no") << "\n";
    if (capacity >= ni)
        check("product-system-rank", res.rank_products == ni,
              std::to_string(res.rank_products) + " of " + std::to_string(ni));

    if (g.mu_known_everywhere() && ni > 0 && !res.projection_only) {
        const graph::VertexFunction truth = truth_on_domain(g, graph::Domain::Interior);
        const double err = metrics::l2rne(truth, res.mu_interior);
        check("exact-data-recovery", err <= 1e-3,
              "l2rne_percent " + io::format_float(err));
    }

    if (failures == 0) {
        std::cout << "all checks passed\n";
        return 0;
    }
    std::cout << failures << " check(s) failed\n";
    return 1;
}

int cmd_metrics(const Options& opt) {
    const graph::Graph g = graph::Graph::from_json_file(opt.graph_path);
    if (opt.recovered_path.empty())
        throw ValidationError("metrics needs --recovered (a vertex CSV)");
    const graph::VertexFunction recovered = io::read_vertex_csv(opt.recovered_path, g);
    const graph::VertexFunction truth = truth_on_domain(g, recovered.domain);
    const auto dir = prepare_out(opt);

    metrics::MetricsReport m;
    if (!opt.data_path.empty()) {
        const fpt::FptTensor empirical = io::read_tensor_csv(opt.data_path, g);
        const fpt::FptTensor exact = fpt::exact_fpt(g, empirical.horizon, empirical.domain);
        m = metrics::compute_metrics(truth, recovered, &exact, &empirical);
    } else {
        m = metrics::compute_metrics(truth, recovered);
    }

    io::write_metrics_csv((dir / "metrics.csv").string(), g, m);
    if (m.frne_percent)
        std::cout << "frne_percent: " << io::format_float(*m.frne_percent) << "\n";
    std::cout << "l2rne_percent: " << io::format_float(m.l2rne_percent) << "\n";
    std::cout << "wrote " << (dir / "metrics.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-passage centrality toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--graph", opt.graph_path, "graph JSON file")->required();
        sub->add_option("--T", opt.T, "time horizon (overrides the graph file)");
        sub->add_option("--seed", opt.seed, "master RNG seed");
        sub->add_option("--tol", opt.tol, "rank cutoff for the least-squares solves");
        sub->add_option("--tol-mode", opt.tol_mode, "relative|absolute")
            ->check(CLI::IsMember({"relative", "absolute"}));
        return sub;
    };

    CLI::App* simulate = add_common(app.add_subcommand(
        "simulate", "sample first-passage distributions by random walks"));
    simulate->add_option("--samples", opt.samples, "walks per observation pair")
        ->required();
    simulate->add_option("--mode", opt.mode, "exact|mc");
    simulate->add_option("--out", opt.out_dir, "output directory")->required();

    CLI::App* exact = add_common(app.add_subcommand(
        "exact", "compute first-passage distributions by the recursion"));
    exact->add_option("--out", opt.out_dir, "output directory")->required();

    CLI::App* reconstruct = add_common(app.add_subcommand(
        "reconstruct", "recover interior centralities from a tensor file"));
    reconstruct->add_option("--data", opt.data_path, "tensor CSV from simulate/exact")
        ->required();
    reconstruct->add_option("--out", opt.out_dir, "output directory")->required();

    add_common(app.add_subcommand("verify", "run the invariant suite on a graph"));

    CLI::App* metrics_cmd = add_common(app.add_subcommand(
        "metrics", "compare a recovered centrality table against the graph's truth"));
    metrics_cmd->add_option("--recovered", opt.recovered_path, "vertex CSV")->required();
    metrics_cmd->add_option("--data", opt.data_path, "tensor CSV for data fidelity");
    metrics_cmd->add_option("--out", opt.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
        if (app.got_subcommand(exact)) return cmd_exact(opt);
        if (app.got_subcommand(reconstruct)) return cmd_reconstruct(opt);
        if (app.got_subcommand(metrics_cmd)) return cmd_metrics(opt);
        return cmd_verify(opt);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const fptrec::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fptrec::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
