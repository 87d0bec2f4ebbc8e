#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chimera/models.hpp"

namespace chimera {

// |state component| beyond this is treated as a blow-up.
inline constexpr double kDivergenceBound = 1e6;

struct IntegrationConfig {
    // Continuous systems (HR, Kuramoto): fixed RK4 step and times.
    double dt = 0.01;
    double transient_time = 500.0; // T0
    double window_time = 500.0;    // T
    // Maps (Henon): counted in iterations instead.
    long transient_steps = 5000;
    long window_steps = 2048;
    // Store every k-th step of the analysis window (both regimes).
    int sample_stride = 10;
};

// Post-transient samples, time contiguous per (node, component) series.
struct TrajectorySet {
    int n_nodes = 0;
    int node_dim = 0;
    size_t n_samples = 0;
    double sample_dt = 0.0; // time between stored samples
    SystemState origin;     // the initial condition that produced this
    std::vector<double> data;

    double* series_ptr(int node, int comp) {
        return data.data() + (static_cast<size_t>(node) * node_dim + comp) * n_samples;
    }
    std::span<const double> series(int node, int comp) const {
        return {data.data() + (static_cast<size_t>(node) * node_dim + comp) * n_samples,
                n_samples};
    }
    double at(int node, int comp, size_t t) const {
        return data[(static_cast<size_t>(node) * node_dim + comp) * n_samples + t];
    }
    // All components of one node, [component][time] contiguous.
    std::span<const double> node_block(int node) const {
        return {data.data() + static_cast<size_t>(node) * node_dim * n_samples,
                static_cast<size_t>(node_dim) * n_samples};
    }
};

struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;
    void resize(size_t n) {
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        k4.resize(n);
        tmp.resize(n);
    }
};

// Classical RK4 step; field(state, deriv) writes the right-hand side.
template <class Field>
void rk4_step(Field&& field, std::vector<double>& y, double dt, Rk4Workspace& ws) {
    const size_t n = y.size();
    ws.resize(n);
    field(std::span<const double>(y), std::span<double>(ws.k1));
    for (size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k1[i];
    field(std::span<const double>(ws.tmp), std::span<double>(ws.k2));
    for (size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k2[i];
    field(std::span<const double>(ws.tmp), std::span<double>(ws.k3));
    for (size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + dt * ws.k3[i];
    field(std::span<const double>(ws.tmp), std::span<double>(ws.k4));
    for (size_t i = 0; i < n; ++i)
        y[i] += dt / 6.0 * (ws.k1[i] + 2.0 * (ws.k2[i] + ws.k3[i]) + ws.k4[i]);
}

// RK4 from t=0 to T0+T; stores every stride-th state of the window (T0, T0+T].
// Throws DivergenceError (with the blow-up time) if any component leaves
// [-1e6, 1e6] or turns non-finite.
TrajectorySet integrate_ode(const SystemModel& model, const SystemState& init,
                            const IntegrationConfig& cfg);

// Map analogue: transient_steps iterations, then window_steps more with stride.
// sample_dt = stride. DivergenceError carries the step index.
TrajectorySet iterate_map(const SystemModel& model, const SystemState& init,
                          const IntegrationConfig& cfg);

enum class ObservableKind { Component0, SinPhase };

// Dense [node][time] matrix, rows contiguous.
struct SeriesMatrix {
    int n_nodes = 0;
    size_t n_samples = 0;
    std::vector<double> data;

    std::span<const double> row(int node) const {
        return {data.data() + static_cast<size_t>(node) * n_samples, n_samples};
    }
    std::span<double> row(int node) {
        return {data.data() + static_cast<size_t>(node) * n_samples, n_samples};
    }
};

// Component0: first component per node (HR x, Henon x, Kuramoto theta).
// SinPhase: sin(theta), node_dim 1 only.
SeriesMatrix observable_series(const TrajectorySet& traj, ObservableKind kind);

// Debug dump, header "t,node,c0[,c1[,c2]]"; t counts from the window start.
void dump_trajectory_csv(const TrajectorySet& traj, const std::string& path);

} // namespace chimera
