#include "chimera/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "chimera/error.hpp"

namespace chimera {

namespace {

void check_cfg_common(const IntegrationConfig& cfg) {
    if (cfg.sample_stride < 1) throw ArgumentError("sample_stride must be >= 1");
}

// Throws unless every component is finite and within the divergence bound.
void check_state(std::span<const double> y, double when) {
    for (double v : y)
        if (!(std::abs(v) <= kDivergenceBound))
            throw DivergenceError("state diverged", when);
}

void store_sample(TrajectorySet& out, std::span<const double> y, size_t t) {
    for (int i = 0; i < out.n_nodes; ++i)
        for (int c = 0; c < out.node_dim; ++c)
            out.series_ptr(i, c)[t] = y[static_cast<size_t>(i) * out.node_dim + c];
}

TrajectorySet make_output(const SystemModel& model, const SystemState& init,
                          size_t n_samples, double sample_dt) {
    TrajectorySet out;
    out.n_nodes = model.network.n_nodes();
    out.node_dim = model.node_dim;
    out.n_samples = n_samples;
    out.sample_dt = sample_dt;
    out.origin = init;
    out.data.resize(static_cast<size_t>(out.n_nodes) * out.node_dim * n_samples);
    return out;
}

} // namespace

TrajectorySet integrate_ode(const SystemModel& model, const SystemState& init,
                            const IntegrationConfig& cfg) {
    if (model.is_map()) throw ArgumentError("integrate_ode: model is a map");
    if (init.size() != model.state_size())
        throw ArgumentError("integrate_ode: initial state length mismatch");
    check_cfg_common(cfg);
    if (!(cfg.dt > 0)) throw ArgumentError("dt must be > 0");
    if (!(cfg.transient_time >= 0)) throw ArgumentError("transient_time must be >= 0");
    if (!(cfg.window_time > 0)) throw ArgumentError("window_time must be > 0");

    const long transient_steps = std::llround(cfg.transient_time / cfg.dt);
    const long window_steps = std::llround(cfg.window_time / cfg.dt);
    const size_t n_samples = static_cast<size_t>(window_steps / cfg.sample_stride);
    if (n_samples == 0) throw ArgumentError("window shorter than one sample stride");

    TrajectorySet out = make_output(model, init, n_samples, cfg.dt * cfg.sample_stride);

    SystemState y = init;
    check_state(y, 0.0);
    Rk4Workspace ws;
    auto field = [&model](std::span<const double> s, std::span<double> d) {
        network_vector_field(model, s, d);
    };
    long step = 0;
    auto advance = [&] {
        rk4_step(field, y, cfg.dt, ws);
        ++step;
        check_state(y, step * cfg.dt);
    };
    for (long k = 0; k < transient_steps; ++k) advance();
    for (size_t t = 0; t < n_samples; ++t) {
        for (int k = 0; k < cfg.sample_stride; ++k) advance();
        store_sample(out, y, t);
    }
    return out;
}

TrajectorySet iterate_map(const SystemModel& model, const SystemState& init,
                          const IntegrationConfig& cfg) {
    if (!model.is_map()) throw ArgumentError("iterate_map: model is not a map");
    if (init.size() != model.state_size())
        throw ArgumentError("iterate_map: initial state length mismatch");
    check_cfg_common(cfg);
    if (cfg.transient_steps < 0) throw ArgumentError("transient_steps must be >= 0");
    if (cfg.window_steps < 1) throw ArgumentError("window_steps must be >= 1");
    const size_t n_samples = static_cast<size_t>(cfg.window_steps / cfg.sample_stride);
    if (n_samples == 0) throw ArgumentError("window shorter than one sample stride");

    TrajectorySet out = make_output(model, init, n_samples, cfg.sample_stride);

    SystemState y = init, next(init.size());
    check_state(y, 0.0);
    long step = 0;
    auto advance = [&] {
        henon_network_step(model, y, next);
        y.swap(next);
        ++step;
        check_state(y, static_cast<double>(step));
    };
    for (long k = 0; k < cfg.transient_steps; ++k) advance();
    for (size_t t = 0; t < n_samples; ++t) {
        for (int k = 0; k < cfg.sample_stride; ++k) advance();
        store_sample(out, y, t);
    }
    return out;
}

SeriesMatrix observable_series(const TrajectorySet& traj, ObservableKind kind) {
    if (kind == ObservableKind::SinPhase && traj.node_dim != 1)
        throw ArgumentError("sin-phase observable requires scalar (phase) nodes");
    SeriesMatrix out;
    out.n_nodes = traj.n_nodes;
    out.n_samples = traj.n_samples;
    out.data.resize(static_cast<size_t>(out.n_nodes) * out.n_samples);
    for (int i = 0; i < traj.n_nodes; ++i) {
        auto src = traj.series(i, 0);
        auto dst = out.row(i);
        if (kind == ObservableKind::Component0)
            std::copy(src.begin(), src.end(), dst.begin());
        else
            for (size_t t = 0; t < src.size(); ++t) dst[t] = std::sin(src[t]);
    }
    return out;
}

void dump_trajectory_csv(const TrajectorySet& traj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open trajectory dump: " + path);
    f << "t,node";
    for (int c = 0; c < traj.node_dim; ++c) f << ",c" << c;
    f << "\n";
    char buf[32];
    for (size_t t = 0; t < traj.n_samples; ++t)
        for (int i = 0; i < traj.n_nodes; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", (t + 1) * traj.sample_dt);
            f << buf << ',' << i;
            for (int c = 0; c < traj.node_dim; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", traj.at(i, c, t));
                f << ',' << buf;
            }
            f << '\n';
        }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace chimera
