#pragma once

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadout/estimators.hpp"

namespace spreadout {

/// Everything a scan needs; serializable so a run is reproducible
/// bit-for-bit from (config, seed, workers).
struct ExperimentConfig {
    int d = 2;
    int L = 1;
    std::vector<double> betas;
    std::vector<std::string> estimators{"chi"};
    uint64_t n_samples = 10000;
    uint64_t cluster_cap = kDefaultClusterCap;
    std::vector<int> triangle_radii{4, 8, 16};
    int phi_radius = 1;
    double sharp_eps = 1.0 - std::exp(-2.0);
    uint64_t seed = 1;
    int workers = 0;
    std::string out_csv = "scan.csv";
    std::string manifest = "scan_manifest.json";
    bool resume = false;
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    return nlohmann::json{{"d", c.d},
                          {"L", c.L},
                          {"betas", c.betas},
                          {"estimators", c.estimators},
                          {"n_samples", c.n_samples},
                          {"cluster_cap", c.cluster_cap},
                          {"triangle_radii", c.triangle_radii},
                          {"phi_radius", c.phi_radius},
                          {"sharp_eps", c.sharp_eps},
                          {"seed", c.seed},
                          {"workers", c.workers}};
}

inline void config_from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (j.contains("d")) c.d = j["d"];
    if (j.contains("L")) c.L = j["L"];
    if (j.contains("betas")) c.betas = j["betas"].get<std::vector<double>>();
    if (j.contains("estimators")) c.estimators = j["estimators"].get<std::vector<std::string>>();
    if (j.contains("n_samples")) c.n_samples = j["n_samples"];
    if (j.contains("cluster_cap")) c.cluster_cap = j["cluster_cap"];
    if (j.contains("triangle_radii")) c.triangle_radii = j["triangle_radii"].get<std::vector<int>>();
    if (j.contains("phi_radius")) c.phi_radius = j["phi_radius"];
    if (j.contains("sharp_eps")) c.sharp_eps = j["sharp_eps"];
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("workers")) c.workers = j["workers"];
    if (j.contains("out_csv")) c.out_csv = j["out_csv"];
    if (j.contains("manifest")) c.manifest = j["manifest"];
}

/// One CSV row; doubles are printed with %.17g so identical runs are
/// byte-identical.
struct ScanRow {
    double beta;
    std::string estimator;
    Estimate e;
};

inline std::string format_row(const ScanRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%" PRIu64 ",%s,%.17g\n", r.beta,
                  r.estimator.c_str(), r.e.value, r.e.std_error, r.e.n_samples,
                  r.e.truncation.empty() ? "-" : r.e.truncation.c_str(), r.e.censored_rate);
    return buf;
}

inline constexpr const char* kCsvHeader = "beta,estimator,value,std_error,n,truncation,censored_rate\n";

/// All rows for one sweep point.
inline std::vector<ScanRow> scan_point(const ExperimentConfig& cfg, double beta,
                                       const RngStream& point_stream) {
    SpreadOutModel m(cfg.d, cfg.L, beta);
    MCOptions opt;
    opt.n_samples = cfg.n_samples;
    opt.workers = cfg.workers;
    opt.cluster_cap = cfg.cluster_cap;
    Point origin = Point::zero(cfg.d);

    std::vector<ScanRow> rows;
    uint64_t est_idx = 0;
    for (const std::string& name : cfg.estimators) {
        RngStream s = point_stream.child(est_idx++);
        if (name == "chi") {
            rows.push_back({beta, "chi", susceptibility_mc(m, Full{}, origin, opt, s)});
        } else if (name == "phi") {
            Estimate e = phi_mc(m, Box{origin, cfg.phi_radius}, origin, opt, s);
            e.truncation = "box_r=" + std::to_string(cfg.phi_radius);
            rows.push_back({beta, "phi", e});
        } else if (name == "sharp_length") {
            SharpLengthResult r = sharp_length(m, cfg.sharp_eps, opt, s);
            Estimate e;
            e.value = static_cast<double>(r.n);
            e.std_error = 0;
            e.n_samples = cfg.n_samples;
            e.truncation = std::string(r.bounded ? "bounded" : "unbounded") +
                           (r.ambiguous ? ";ambiguous" : "");
            rows.push_back({beta, "sharp_length", e});
        } else if (name == "triangle") {
            auto est = triangle_mc(m, cfg.triangle_radii, opt, s);
            for (size_t i = 0; i < est.size(); ++i) {
                est[i].truncation = "R=" + std::to_string(cfg.triangle_radii[i]);
                rows.push_back({beta, "triangle_r" + std::to_string(cfg.triangle_radii[i]), est[i]});
            }
        } else if (name == "psi") {
            Estimate e = psi_mc(m, 1, opt, s);
            e.truncation = "H_1";
            rows.push_back({beta, "psi", e});
        } else {
            throw UsageError("scan: unknown estimator '" + name + "'");
        }
    }
    return rows;
}

struct ScanOutcome {
    size_t points_done = 0;
    size_t points_skipped = 0;
    double wall_seconds = 0;
};

/// Runs the sweep: rows are appended to the CSV as each point completes and
/// the manifest records progress, so an interrupted run resumes from the
/// last completed point.
inline ScanOutcome run_scan(const ExperimentConfig& cfg) {
    if (cfg.betas.empty()) throw UsageError("scan: no beta points");
    auto t0 = std::chrono::steady_clock::now();

    size_t start_at = 0;
    bool append = false;
    if (cfg.resume) {
        std::ifstream mf(cfg.manifest);
        if (mf) {
            nlohmann::json j = nlohmann::json::parse(mf, nullptr, false);
            if (!j.is_discarded() && j.contains("config") && j.contains("completed") &&
                j["config"] == config_to_json(cfg)) {
                start_at = j["completed"].get<size_t>();
                append = start_at > 0;
            }
        }
    }

    std::ofstream csv(cfg.out_csv, append ? std::ios::app : std::ios::trunc);
    if (!csv) throw UsageError("scan: cannot open " + cfg.out_csv);
    if (!append) csv << kCsvHeader;

    RngStream root{cfg.seed};
    ScanOutcome out;
    out.points_skipped = start_at;
    for (size_t i = start_at; i < cfg.betas.size(); ++i) {
        auto rows = scan_point(cfg, cfg.betas[i], root.child(i));
        for (const auto& r : rows) csv << format_row(r);
        csv.flush();
        ++out.points_done;

        auto now = std::chrono::steady_clock::now();
        out.wall_seconds = std::chrono::duration<double>(now - t0).count();
        nlohmann::json man{{"config", config_to_json(cfg)},
                           {"completed", i + 1},
                           {"total", cfg.betas.size()},
                           {"wall_seconds", out.wall_seconds},
                           {"format", "spreadout-scan v1"}};
        std::ofstream mf(cfg.manifest, std::ios::trunc);
        mf << man.dump(2) << "\n";
    }
    return out;
}

}  // namespace spreadout
