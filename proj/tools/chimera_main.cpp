#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chimera/config.hpp"
#include "chimera/error.hpp"
#include "chimera/hash.hpp"
#include "chimera/pipeline.hpp"
#include "chimera/render.hpp"

namespace fs = std::filesystem;
using namespace chimera;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;
void on_sigint(int) { g_interrupted = 1; }

struct CommonArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string output_dir;
    int workers = 0;
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_workers) {
    sub->add_option("-c,--config", args.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", args.sets,
                    "override a config value by dotted path, e.g. integration.dt=0.005");
    sub->add_option("-o,--output-dir", args.output_dir, "override output_dir");
    if (with_workers)
        sub->add_option("-w,--workers", args.workers,
                        "sweep worker threads (overrides config and CHIMERA_WORKERS)");
}

ValidatedConfig load_validated(const CommonArgs& args) {
    std::vector<std::string> overrides = args.sets;
    if (!args.output_dir.empty()) overrides.push_back("output_dir=" + args.output_dir);
    return validate_config(args.config, overrides);
}

int env_workers() {
    const char* v = std::getenv("CHIMERA_WORKERS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1 || n > 4096)
        throw ConfigError("CHIMERA_WORKERS must be a positive integer, got: " +
                          std::string(v));
    return static_cast<int>(n);
}

RunOptions make_run_options(const CommonArgs& args) {
    RunOptions opts;
    opts.workers = args.workers > 0 ? args.workers : env_workers();
    opts.log = &std::cerr;
    opts.progress = [last = static_cast<size_t>(-1)](size_t done, size_t total) mutable {
        if (g_interrupted) return false;
        if (done != last) {
            last = done;
            std::fprintf(stderr, "\r[sweep] %zu/%zu (%.1f%%)%s", done, total,
                         total ? 100.0 * static_cast<double>(done) /
                                     static_cast<double>(total)
                               : 100.0,
                         done == total ? "\n" : "");
            std::fflush(stderr);
        }
        return true;
    };
    return opts;
}

BasinMap load_labels_for(const ValidatedConfig& vc) {
    const std::string path = output_path(vc.cfg, kLabelsFile);
    if (!fs::exists(path))
        throw IoError("label grid not found (run the sweep+cluster stages first): " + path);
    BasinMap bm = load_label_grid(path);
    if (bm.nx != vc.cfg.slice.nx || bm.ny != vc.cfg.slice.ny)
        throw ValidationError("label grid " + path + " is " + std::to_string(bm.nx) + "x" +
                              std::to_string(bm.ny) + " but the config slice is " +
                              std::to_string(vc.cfg.slice.nx) + "x" +
                              std::to_string(vc.cfg.slice.ny));
    return bm;
}

int cmd_validate(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    std::cout << vc.normalized.dump(2) << "\n";
    std::cerr << "config ok; digest " << hex64(vc.config_digest) << "\n";
    return 0;
}

int cmd_net(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    const Network& net = vc.model.network;
    const NetworkSummary info = network_info(net);
    std::cout << "name: " << net.name() << "\n"
              << "nodes: " << net.n_nodes() << "\n"
              << "directed: " << (net.directed() ? "yes" : "no") << "\n"
              << "edges: " << info.edge_count << "\n"
              << "weight range: [" << info.min_weight << ", " << info.max_weight << "]\n"
              << "symmetric: " << (info.is_symmetric ? "yes" : "no") << "\n";
    std::cout << "weighted degrees:";
    for (double d : info.degree_per_node) std::cout << " " << d;
    std::cout << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::vector<int>& dump_cell,
              const std::string& traj_out) {
    const ValidatedConfig vc = load_validated(args);
    if (!dump_cell.empty()) {
        const int ix = dump_cell[0], iy = dump_cell[1];
        if (ix < 0 || ix >= vc.cfg.slice.nx || iy < 0 || iy >= vc.cfg.slice.ny)
            throw ArgumentError("--dump-traj cell out of grid range");
        const SystemState init = slice_state(vc.cfg.slice, vc.model.node_dim, ix, iy);
        const TrajectorySet traj = vc.model.is_map()
                                       ? iterate_map(vc.model, init, vc.cfg.integration)
                                       : integrate_ode(vc.model, init, vc.cfg.integration);
        dump_trajectory_csv(traj, traj_out);
        std::cerr << "trajectory for cell (" << ix << ", " << iy << ") written to "
                  << traj_out << "\n";
        return 0;
    }
    RunOptions opts = make_run_options(args);
    if (maybe_reuse_vps(vc)) {
        std::cerr << "sweep already complete for this configuration: "
                  << output_path(vc.cfg, kVpsFile) << "\n";
        return 0;
    }
    write_initial_provenance(vc);
    const SweepResult sr = run_sweep(vc, opts);
    std::cerr << "sweep complete: " << sr.matrix.rows << " rows ("
              << sr.n_diverged << " diverged, " << sr.n_resumed
              << " resumed) -> " << output_path(vc.cfg, kVpsFile) << "\n";
    return 0;
}

int cmd_cluster(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    const std::string vps_path = output_path(vc.cfg, kVpsFile);
    if (!fs::exists(vps_path))
        throw IoError("fingerprint matrix not found (run the sweep first): " + vps_path);
    const VpsMatrix vm = load_vps_matrix(vps_path);
    const ClusterOutcome co = cluster_vps(vc, vm);
    const BasinMap bm = build_basin_map(vc.cfg.slice, co.clustering);
    save_label_grid(output_path(vc.cfg, kLabelsFile), bm);
    std::cout << "k: " << co.clustering.k << (co.used_elbow ? " (elbow)" : " (fixed)") << "\n";
    if (co.used_elbow) {
        std::cout << "inertia curve:";
        for (double w : co.elbow.inertia_curve) std::cout << " " << w;
        std::cout << "\n";
        for (const auto& w : co.elbow.warnings) std::cerr << "warning: " << w << "\n";
    }
    std::vector<size_t> sizes(static_cast<size_t>(co.clustering.k), 0);
    size_t sentinels = 0;
    for (int lbl : co.clustering.labels)
        lbl < 0 ? ++sentinels : ++sizes[static_cast<size_t>(lbl)];
    std::cout << "cluster sizes:";
    for (size_t s : sizes) std::cout << " " << s;
    std::cout << "\ndiverged cells: " << sentinels << "\n"
              << "labels: " << output_path(vc.cfg, kLabelsFile) << "\n";
    return 0;
}

int cmd_basin(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    const BasinMap bm = load_labels_for(vc);
    std::vector<size_t> sizes(static_cast<size_t>(bm.k), 0);
    size_t sentinels = 0;
    for (int lbl : bm.label_grid)
        lbl < 0 ? ++sentinels : ++sizes[static_cast<size_t>(lbl)];
    const size_t total = bm.label_grid.size();
    std::cout << "grid: " << bm.nx << "x" << bm.ny << "\n"
              << "basins: " << bm.k << "\n";
    for (size_t i = 0; i < sizes.size(); ++i)
        std::cout << "  basin " << i << ": " << sizes[i] << " cells ("
                  << 100.0 * static_cast<double>(sizes[i]) / static_cast<double>(total)
                  << "%)\n";
    std::cout << "diverged: " << sentinels << " cells\n";
    return 0;
}

int cmd_fractal(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    const BasinMap bm = load_labels_for(vc);
    const nlohmann::json doc = fractal_report(vc, bm);
    {
        std::ofstream f(output_path(vc.cfg, kFractalFile), std::ios::trunc);
        f << doc.dump(2) << "\n";
        if (!f) throw IoError("cannot write " + output_path(vc.cfg, kFractalFile));
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_render(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    const BasinMap bm = load_labels_for(vc);
    render_basin(bm, vc.cfg.palette_seed, output_path(vc.cfg, kBasinImage));
    render_boundary(extract_boundary(bm), output_path(vc.cfg, kBoundaryImage));
    std::cerr << "wrote " << output_path(vc.cfg, kBasinImage) << " and "
              << output_path(vc.cfg, kBoundaryImage) << "\n";
    return 0;
}

int cmd_run(const CommonArgs& args) {
    const ValidatedConfig vc = load_validated(args);
    if (vc.cfg.long_run)
        std::cerr << "note: this configuration is marked long_run; expect hours of compute\n";
    const RunSummary rs = run_pipeline(vc, make_run_options(args));
    std::cout << "basins: " << rs.k << "\n";
    std::cout << "cluster sizes:";
    for (size_t s : rs.cluster_sizes) std::cout << " " << s;
    std::cout << "\ndiverged cells: " << rs.n_diverged << "\n";
    const auto& box = rs.fractal["box_count"];
    if (box.contains("d_box") && box["d_box"].is_number())
        std::cout << "d_box: " << box["d_box"].get<double>() << "\n";
    const auto& unc = rs.fractal["uncertainty"];
    if (unc.is_object() && unc.contains("alpha") && unc["alpha"].is_number())
        std::cout << "alpha: " << unc["alpha"].get<double>()
                  << " (implied dimension " << unc["implied_dimension"].get<double>()
                  << ")\n";
    std::cout << "output: " << rs.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"map basins of attraction of chimera states in networked dynamical systems"};
    app.require_subcommand(1);

    CommonArgs a_validate, a_net, a_sweep, a_cluster, a_basin, a_fractal, a_render, a_run;
    std::vector<int> dump_cell;
    std::string traj_out = "trajectory.csv";

    add_common(app.add_subcommand("validate", "check a config and echo it normalized"),
               a_validate, false);
    add_common(app.add_subcommand("net", "load or generate the network and summarize it"),
               a_net, false);
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "integrate the initial-condition grid into a fingerprint matrix");
    add_common(sweep_cmd, a_sweep, true);
    sweep_cmd->add_option("--dump-traj", dump_cell,
                          "grid cell ix iy: write that trajectory as CSV and exit")
        ->expected(2);
    sweep_cmd->add_option("--traj-out", traj_out, "CSV path for --dump-traj");
    add_common(app.add_subcommand("cluster", "cluster fingerprints into basin labels"),
               a_cluster, false);
    add_common(app.add_subcommand("basin", "summarize a computed label grid"), a_basin,
               false);
    add_common(app.add_subcommand("fractal", "box-count and uncertainty analysis"),
               a_fractal, false);
    add_common(app.add_subcommand("render", "write PPM images of the basin map"),
               a_render, false);
    add_common(app.add_subcommand("run", "full pipeline: sweep, cluster, fractal, render"),
               a_run, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // app.exit prints the message (or help text); fold CLI11's assorted
        // parse-error codes into the documented usage-error code 2.
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::signal(SIGINT, on_sigint);
    try {
        if (app.got_subcommand("validate")) return cmd_validate(a_validate);
        if (app.got_subcommand("net")) return cmd_net(a_net);
        if (app.got_subcommand("sweep")) return cmd_sweep(a_sweep, dump_cell, traj_out);
        if (app.got_subcommand("cluster")) return cmd_cluster(a_cluster);
        if (app.got_subcommand("basin")) return cmd_basin(a_basin);
        if (app.got_subcommand("fractal")) return cmd_fractal(a_fractal);
        if (app.got_subcommand("render")) return cmd_render(a_render);
        if (app.got_subcommand("run")) return cmd_run(a_run);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SweepInterrupted& e) {
        std::cerr << "\ninterrupted: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
