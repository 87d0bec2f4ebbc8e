#include "chimera/pipeline.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "chimera/error.hpp"
#include "chimera/hash.hpp"
#include "chimera/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace chimera {

namespace {

std::string iso8601_utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_file(const std::string& path, const json& doc) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f << doc.dump(2) << '\n';
        if (!f) throw IoError("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

json json_num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void log_line(const RunOptions& opts, const std::string& line) {
    if (opts.log) *opts.log << line << std::endl;
}

} // namespace

int resolve_workers(const PipelineConfig& cfg, int override_workers) {
    int w = override_workers > 0 ? override_workers : cfg.workers;
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, w);
}

std::string output_path(const PipelineConfig& cfg, const char* filename) {
    return (fs::path(cfg.output_dir) / filename).string();
}

uint64_t file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    Hasher h;
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof buf);
        h.update(buf, static_cast<size_t>(f.gcount()));
    }
    return h.digest();
}

std::optional<VpsMatrix> maybe_reuse_vps(const ValidatedConfig& vc) {
    const std::string prov_path = output_path(vc.cfg, kProvenanceFile);
    const std::string vps_path = output_path(vc.cfg, kVpsFile);
    if (!fs::exists(prov_path) || !fs::exists(vps_path)) return std::nullopt;
    json prov;
    try {
        std::ifstream f(prov_path);
        f >> prov;
    } catch (const json::exception&) {
        return std::nullopt;
    }
    if (!prov.contains("config_digest") || !prov["config_digest"].is_string() ||
        prov["config_digest"].get<std::string>() != hex64(vc.config_digest))
        return std::nullopt;
    VpsMatrix vm;
    try {
        vm = load_vps_matrix(vps_path);
    } catch (const Error&) {
        return std::nullopt;
    }
    const auto n = static_cast<uint32_t>(vc.model.network.n_nodes());
    const auto rows = static_cast<uint32_t>(vc.cfg.slice.nx) * vc.cfg.slice.ny;
    if (vm.rows != rows || vm.len != n * (n - 1)) return std::nullopt;
    return vm;
}

json write_initial_provenance(const ValidatedConfig& vc) {
    json prov;
    prov["tool_version"] = kToolVersion;
    prov["config_digest"] = hex64(vc.config_digest);
    prov["config"] = vc.normalized;
    prov["status"] = "running";
    prov["started_at"] = iso8601_utc_now();
    fs::create_directories(vc.cfg.output_dir);
    write_json_file(output_path(vc.cfg, kProvenanceFile), prov);
    return prov;
}

SweepResult run_sweep(const ValidatedConfig& vc, const RunOptions& opts) {
    SweepOptions sopts;
    sopts.workers = resolve_workers(vc.cfg, opts.workers);
    sopts.checkpoint_dir = (fs::path(vc.cfg.output_dir) / kCheckpointDir).string();
    sopts.final_vps_path = output_path(vc.cfg, kVpsFile);
    sopts.progress = opts.progress;
    return sweep(vc.model, vc.cfg.slice, vc.cfg.integration, vc.cfg.vps, vc.cfg.observable,
                 sopts);
}

ClusterOutcome cluster_vps(const ValidatedConfig& vc, const VpsMatrix& vm) {
    const auto& cl = vc.cfg.clustering;
    ClusterOutcome out;
    int k = cl.k;
    if (cl.use_elbow) {
        out.used_elbow = true;
        out.elbow = select_k_elbow(vm, cl.k_max, stage_seed(vc.cfg.seed, SeedStage::Elbow),
                                   cl.restarts, cl.max_iters);
        k = out.elbow.k;
    }
    out.clustering = kmeans_cluster(vm, k, stage_seed(vc.cfg.seed, SeedStage::Cluster),
                                    cl.restarts, cl.max_iters);
    return out;
}

json fractal_report(const ValidatedConfig& vc, const BasinMap& bm) {
    json doc;
    const BoundaryGrid bg = extract_boundary(bm);
    doc["boundary_cells"] = bg.count();

    json box;
    try {
        const BoxCountResult r = fit_box_dimension(box_count(bg, vc.cfg.fractal.box_scales));
        box["d_box"] = json_num(r.d_box);
        box["fit_intercept"] = json_num(r.fit_intercept);
        box["fit_r2"] = json_num(r.fit_r2);
        box["window_eps"] = {r.window_min_eps, r.window_max_eps};
        json scales = json::array();
        for (const auto& s : r.scales) scales.push_back({{"epsilon", s.epsilon}, {"count", s.count}});
        box["scales"] = scales;
        box["error"] = nullptr;
    } catch (const EmptyBoundaryError& e) {
        box = {{"d_box", nullptr}, {"error", std::string(e.what())}};
    } catch (const InsufficientScalesError& e) {
        box = {{"d_box", nullptr}, {"error", std::string(e.what())}};
    }
    doc["box_count"] = box;

    if (vc.cfg.fractal.uncertainty_enabled) {
        json unc;
        try {
            const UncertaintyResult u =
                uncertainty_exponent(bm, vc.cfg.slice, vc.cfg.fractal.epsilons,
                                     vc.cfg.fractal.n_pairs,
                                     stage_seed(vc.cfg.seed, SeedStage::Uncertainty));
            unc["alpha"] = json_num(u.alpha);
            unc["implied_dimension"] = json_num(u.implied_dimension);
            unc["fit_ok"] = u.fit_ok;
            unc["epsilons"] = u.epsilons;
            unc["uncertain_fraction"] = u.uncertain_fraction;
            unc["error"] = nullptr;
        } catch (const Error& e) {
            unc = {{"alpha", nullptr}, {"fit_ok", false}, {"error", std::string(e.what())}};
        }
        doc["uncertainty"] = unc;
    } else {
        doc["uncertainty"] = nullptr;
    }
    return doc;
}

RunSummary run_pipeline(const ValidatedConfig& vc, const RunOptions& opts) {
    const auto& cfg = vc.cfg;
    RunSummary rs;
    rs.output_dir = cfg.output_dir;

    auto cached = maybe_reuse_vps(vc);
    json prov = write_initial_provenance(vc);

    VpsMatrix vm;
    if (cached) {
        vm = std::move(*cached);
        rs.sweep_reused = true;
        for (size_t r = 0; r < vm.rows; ++r)
            if (is_sentinel_row(vm.row(r))) ++rs.n_diverged;
        log_line(opts, "[sweep] reusing " + output_path(cfg, kVpsFile) + " (" +
                           std::to_string(vm.rows) + " rows)");
    } else {
        log_line(opts, "[sweep] " + std::to_string(cfg.slice.nx) + "x" +
                           std::to_string(cfg.slice.ny) + " grid, " +
                           std::to_string(resolve_workers(cfg, opts.workers)) + " worker(s)");
        SweepResult sr = run_sweep(vc, opts);
        vm = std::move(sr.matrix);
        rs.n_diverged = sr.n_diverged;
        rs.n_resumed = sr.n_resumed;
        log_line(opts, "[sweep] done; diverged rows: " + std::to_string(rs.n_diverged) +
                           ", resumed rows: " + std::to_string(rs.n_resumed));
    }

    log_line(opts, "[cluster] fingerprint matrix " + std::to_string(vm.rows) + " x " +
                       std::to_string(vm.len));
    ClusterOutcome co = cluster_vps(vc, vm);
    vm.data.clear();
    vm.data.shrink_to_fit();
    rs.k = co.clustering.k;
    rs.cluster_sizes.assign(static_cast<size_t>(rs.k), 0);
    for (int lbl : co.clustering.labels)
        if (lbl >= 0) ++rs.cluster_sizes[static_cast<size_t>(lbl)];
    log_line(opts, "[cluster] k = " + std::to_string(rs.k) +
                       (co.used_elbow ? " (elbow)" : " (fixed)"));
    for (const auto& w : co.elbow.warnings) log_line(opts, "[cluster] warning: " + w);

    const BasinMap bm = build_basin_map(cfg.slice, co.clustering);
    save_label_grid(output_path(cfg, kLabelsFile), bm);

    rs.fractal = fractal_report(vc, bm);
    write_json_file(output_path(cfg, kFractalFile), rs.fractal);
    if (rs.fractal["box_count"].contains("d_box") && rs.fractal["box_count"]["d_box"].is_number())
        log_line(opts, "[fractal] d_box = " +
                           std::to_string(rs.fractal["box_count"]["d_box"].get<double>()));
    else
        log_line(opts, "[fractal] box-count fit unavailable");

    render_basin(bm, cfg.palette_seed, output_path(cfg, kBasinImage));
    render_boundary(extract_boundary(bm), output_path(cfg, kBoundaryImage));

    prov["status"] = "complete";
    prov["finished_at"] = iso8601_utc_now();
    json sweep_j;
    sweep_j["rows"] = static_cast<uint64_t>(cfg.slice.nx) * cfg.slice.ny;
    sweep_j["vps_len"] = vc.model.network.n_nodes() * (vc.model.network.n_nodes() - 1);
    sweep_j["n_samples"] = cfg.n_samples;
    sweep_j["n_diverged"] = rs.n_diverged;
    sweep_j["n_resumed"] = rs.n_resumed;
    sweep_j["reused"] = rs.sweep_reused;
    prov["sweep"] = sweep_j;
    json clus_j;
    clus_j["k"] = rs.k;
    clus_j["cluster_sizes"] = rs.cluster_sizes;
    clus_j["inertia"] = json_num(co.clustering.inertia);
    clus_j["used_elbow"] = co.used_elbow;
    if (co.used_elbow)
        clus_j["elbow"] = {{"k", co.elbow.k},
                           {"inertia_curve", co.elbow.inertia_curve},
                           {"k_max_used", co.elbow.k_max_used},
                           {"warnings", co.elbow.warnings}};
    prov["clustering"] = clus_j;
    prov["fractal"] = rs.fractal;
    json artifacts;
    for (const char* f : {kVpsFile, kLabelsFile, kFractalFile, kBasinImage, kBoundaryImage})
        artifacts[f] = hex64(file_digest(output_path(cfg, f)));
    prov["artifacts"] = artifacts;
    write_json_file(output_path(cfg, kProvenanceFile), prov);
    log_line(opts, "[done] artifacts in " + cfg.output_dir);
    return rs;
}

} // namespace chimera
