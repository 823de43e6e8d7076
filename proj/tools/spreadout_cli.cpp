// Command-line front end for the spread-out percolation laboratory.
//
// Exit codes: 0 success, 1 a verification check failed, 2 bad usage,
// 3 a capacity or censoring refusal.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "spreadout/cli/experiment.hpp"
#include "spreadout/estimators.hpp"
#include "spreadout/oracle.hpp"
#include "spreadout/randwalk.hpp"

using namespace spreadout;

namespace {

int cmd_scan(const std::string& config_path, ExperimentConfig cfg,
             const std::vector<std::string>& overridden) {
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw UsageError("scan: cannot read config " + config_path);
        ExperimentConfig from_file = cfg;
        config_from_json(nlohmann::json::parse(f), from_file);
        // flags given on the command line win over the file
        ExperimentConfig flags = cfg;
        cfg = from_file;
        for (const auto& name : overridden) {
            if (name == "--d") cfg.d = flags.d;
            else if (name == "--L") cfg.L = flags.L;
            else if (name == "--betas") cfg.betas = flags.betas;
            else if (name == "--estimators") cfg.estimators = flags.estimators;
            else if (name == "--n") cfg.n_samples = flags.n_samples;
            else if (name == "--cap") cfg.cluster_cap = flags.cluster_cap;
            else if (name == "--radii") cfg.triangle_radii = flags.triangle_radii;
            else if (name == "--phi-radius") cfg.phi_radius = flags.phi_radius;
            else if (name == "--eps") cfg.sharp_eps = flags.sharp_eps;
            else if (name == "--seed") cfg.seed = flags.seed;
            else if (name == "--workers") cfg.workers = flags.workers;
            else if (name == "--out") cfg.out_csv = flags.out_csv;
            else if (name == "--manifest") cfg.manifest = flags.manifest;
            else if (name == "--resume") cfg.resume = flags.resume;
        }
    }
    ScanOutcome out = run_scan(cfg);
    std::printf("scan: %zu points written (%zu resumed), %.1fs, csv=%s\n", out.points_done,
                out.points_skipped, out.wall_seconds, cfg.out_csv.c_str());
    return 0;
}

int cmd_verify(int n_instances, uint64_t seed, const std::string& dump_dir,
               const std::string& replay) {
    if (!replay.empty()) {
        std::ifstream rf(replay);
        if (!rf) throw UsageError("verify: cannot read " + replay);
        OracleInstance inst = load_instance(rf);
        auto reports = verify_instance(inst);
        bool ok = true;
        for (const auto& r : reports) {
            std::printf("%-24s lhs=%.12g rhs=%.12g slack=%.3g %s\n", r.descriptor.c_str(), r.lhs,
                        r.rhs, r.slack(), r.passed() ? "ok" : "FAIL");
            ok = ok && r.passed();
        }
        return ok ? 0 : 1;
    }
    RngStream stream{seed};
    SweepResult res = oracle_sweep(n_instances, stream, dump_dir);
    std::printf("verify: %zu instances, %zu checks, %zu failures\n", res.instances, res.checks,
                res.failures.size());
    for (const auto& r : res.failures)
        std::printf("  FAIL %s lhs=%.12g rhs=%.12g\n", r.descriptor.c_str(), r.lhs, r.rhs);
    return res.failures.empty() ? 0 : 1;
}

int cmd_rw(int d, int L, int n, uint64_t horizon, uint64_t n_samples, uint64_t seed, int window) {
    RngStream stream{seed};
    Point target = Point::axis(d, 0, n);
    GreenResult dp = halfspace_green_dp(d, L, target, horizon, window);
    Estimate mc = halfspace_green_mc(d, L, target, horizon, n_samples, stream.child(1));
    std::printf("green at n=%d: dp=%.8g (leak %.2g)  mc=%.8g +- %.2g\n", n, dp.value, dp.leakage,
                mc.value, mc.std_error);
    Estimate gr = gamblers_ruin(L, n, n_samples, stream.child(2));
    std::printf("gamblers ruin to level %d: %.6g +- %.2g (k*est/L = %.4g)\n", n, gr.value,
                gr.std_error, n * gr.value / L);
    return 0;
}

int cmd_triangle(int d, int L, double beta, std::vector<int> radii, uint64_t n, uint64_t seed,
                 int workers) {
    SpreadOutModel m(d, L, beta);
    MCOptions opt;
    opt.n_samples = n;
    opt.workers = workers;
    auto est = triangle_mc(m, radii, opt, RngStream{seed});
    std::printf("%s", kCsvHeader);
    for (size_t i = 0; i < est.size(); ++i) {
        est[i].truncation = "R=" + std::to_string(radii[i]);
        std::printf("%s", format_row({beta, "triangle_r" + std::to_string(radii[i]), est[i]}).c_str());
    }
    return 0;
}

int cmd_bootstrap(int d, int L, double beta, double C, int n_max, uint64_t n, uint64_t seed,
                  int workers) {
    SpreadOutModel m(d, L, beta);
    MCOptions opt;
    opt.n_samples = n;
    opt.workers = workers;
    std::vector<int> shifts;
    std::vector<Point> targets;
    for (int s = 2; s <= n_max; s *= 2) {
        shifts.push_back(s);
        targets.push_back(Point::axis(d, 0, s));
    }
    BootstrapReport rep = bootstrap_check(m, C, shifts, targets, opt, RngStream{seed});
    for (size_t i = 0; i < rep.l1_checks.size(); ++i)
        std::printf("psi n=%d: %.6g +- %.2g vs %.6g %s\n", rep.half_space_shifts[i],
                    rep.l1_checks[i].value, rep.l1_checks[i].std_error, rep.l1_checks[i].bound,
                    rep.l1_checks[i].passed() ? "ok" : "FAIL");
    for (size_t i = 0; i < rep.linf_checks.size(); ++i)
        std::printf("half-space x1=%d: %.6g +- %.2g vs %.6g %s\n", rep.targets[i][0],
                    rep.linf_checks[i].value, rep.linf_checks[i].std_error,
                    rep.linf_checks[i].bound, rep.linf_checks[i].passed() ? "ok" : "FAIL");
    return rep.passed() ? 0 : 1;
}

int cmd_sharp_length(int d, int L, double beta, double eps, uint64_t n, uint64_t seed,
                     int workers) {
    SpreadOutModel m(d, L, beta);
    MCOptions opt;
    opt.n_samples = n;
    opt.workers = workers;
    SharpLengthResult r = sharp_length(m, eps, opt, RngStream{seed});
    std::printf("L(eps=%.6g) = %d (%s%s), phi=%.6g +- %.2g\n", eps, r.n,
                r.bounded ? "bounded" : "unbounded", r.ambiguous ? ", ambiguous" : "", r.phi_at_n,
                r.phi_se);
    return 0;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_doubles(s)) out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spread-out percolation laboratory"};
    app.require_subcommand(1);

    // scan
    auto* scan = app.add_subcommand("scan", "sweep beta points and write CSV + manifest");
    std::string config_path, betas_str, estimators_str = "chi", radii_str = "4,8,16";
    ExperimentConfig cfg;
    scan->add_option("--config", config_path, "JSON config file; flags override it");
    scan->add_option("--d", cfg.d);
    scan->add_option("--L", cfg.L);
    scan->add_option("--betas", betas_str, "comma-separated beta values");
    scan->add_option("--estimators", estimators_str, "comma list: chi,phi,sharp_length,triangle,psi");
    scan->add_option("--n", cfg.n_samples);
    scan->add_option("--cap", cfg.cluster_cap);
    scan->add_option("--radii", radii_str);
    scan->add_option("--phi-radius", cfg.phi_radius);
    scan->add_option("--eps", cfg.sharp_eps);
    scan->add_option("--seed", cfg.seed);
    scan->add_option("--workers", cfg.workers);
    scan->add_option("--out", cfg.out_csv);
    scan->add_option("--manifest", cfg.manifest);
    scan->add_flag("--resume", cfg.resume, "skip points already recorded in the manifest");

    // verify
    auto* verify = app.add_subcommand("verify", "randomized inequality checks on small graphs");
    int n_instances = 500;
    uint64_t vseed = 1;
    std::string dump_dir, replay;
    verify->add_option("--instances", n_instances);
    verify->add_option("--seed", vseed);
    verify->add_option("--dump-dir", dump_dir, "directory for failing-instance replay files");
    verify->add_option("--replay", replay, "re-check a single saved instance file");

    // rw
    auto* rw = app.add_subcommand("rw", "half-space Green function and ruin probabilities");
    int rw_d = 3, rw_L = 2, rw_n = 1;
    uint64_t rw_T = 200, rw_N = 100000, rw_seed = 1;
    int rw_window = 64;
    rw->add_option("--d", rw_d);
    rw->add_option("--L", rw_L);
    rw->add_option("--x", rw_n, "target point n*e1");
    rw->add_option("--horizon", rw_T);
    rw->add_option("--n", rw_N);
    rw->add_option("--seed", rw_seed);
    rw->add_option("--window", rw_window);

    // triangle
    auto* tri = app.add_subcommand("triangle", "triangle diagram at nested radii");
    int t_d = 7, t_L = 1, t_workers = 0;
    double t_beta = 0.5;
    std::string t_radii = "4,8,16";
    uint64_t t_n = 100000, t_seed = 1;
    tri->add_option("--d", t_d);
    tri->add_option("--L", t_L);
    tri->add_option("--beta", t_beta);
    tri->add_option("--radii", t_radii);
    tri->add_option("--n", t_n);
    tri->add_option("--seed", t_seed);
    tri->add_option("--workers", t_workers);

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "half-space bound checks");
    int b_d = 3, b_L = 4, b_nmax = 8, b_workers = 0;
    double b_beta = 1.0, b_C = 4.0;
    uint64_t b_n = 100000, b_seed = 1;
    boot->add_option("--d", b_d);
    boot->add_option("--L", b_L);
    boot->add_option("--beta", b_beta);
    boot->add_option("--C", b_C);
    boot->add_option("--nmax", b_nmax);
    boot->add_option("--n", b_n);
    boot->add_option("--seed", b_seed);
    boot->add_option("--workers", b_workers);

    // sharp-length
    auto* sl = app.add_subcommand("sharp-length", "smallest box with subcritical boundary flux");
    int s_d = 2, s_L = 1, s_workers = 0;
    double s_beta = 0.5, s_eps = 1.0 - std::exp(-2.0);
    uint64_t s_n = 20000, s_seed = 1;
    sl->add_option("--d", s_d);
    sl->add_option("--L", s_L);
    sl->add_option("--beta", s_beta);
    sl->add_option("--eps", s_eps);
    sl->add_option("--n", s_n);
    sl->add_option("--seed", s_seed);
    sl->add_option("--workers", s_workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (scan->parsed()) {
            std::vector<std::string> overridden;
            for (const auto* opt : scan->get_options())
                if (opt->count() > 0) overridden.push_back(opt->get_name());
            if (!betas_str.empty()) cfg.betas = parse_doubles(betas_str);
            cfg.estimators.clear();
            {
                size_t pos = 0;
                while (pos < estimators_str.size()) {
                    size_t next = estimators_str.find(',', pos);
                    if (next == std::string::npos) next = estimators_str.size();
                    cfg.estimators.push_back(estimators_str.substr(pos, next - pos));
                    pos = next + 1;
                }
            }
            cfg.triangle_radii = parse_ints(radii_str);
            return cmd_scan(config_path, cfg, overridden);
        }
        if (verify->parsed()) return cmd_verify(n_instances, vseed, dump_dir, replay);
        if (rw->parsed()) return cmd_rw(rw_d, rw_L, rw_n, rw_T, rw_N, rw_seed, rw_window);
        if (tri->parsed())
            return cmd_triangle(t_d, t_L, t_beta, parse_ints(t_radii), t_n, t_seed, t_workers);
        if (boot->parsed())
            return cmd_bootstrap(b_d, b_L, b_beta, b_C, b_nmax, b_n, b_seed, b_workers);
        if (sl->parsed())
            return cmd_sharp_length(s_d, s_L, s_beta, s_eps, s_n, s_seed, s_workers);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity refusal: %s\n", e.what());
        return 3;
    } catch (const CensoringError& e) {
        std::fprintf(stderr, "censoring refusal: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
