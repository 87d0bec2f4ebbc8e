#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chimera/integrate.hpp"
#include "chimera/kmeans.hpp"
#include "chimera/models.hpp"
#include "chimera/vps.hpp"

namespace chimera {

struct SliceAxis {
    int node = 0;
    int component = 0;
    bool operator==(const SliceAxis&) const = default;
};

// 2-D cut through initial-condition space: two state coordinates vary on a
// uniform nx x ny grid, everything else is frozen at base_state.
struct SliceSpec {
    SliceAxis axis1, axis2;
    double min1 = 0.0, max1 = 1.0;
    double min2 = 0.0, max2 = 1.0;
    int nx = 2, ny = 2;
    SystemState base_state;
};

inline double slice_coord1(const SliceSpec& s, int ix) {
    return s.min1 + ix * (s.max1 - s.min1) / (s.nx - 1);
}
inline double slice_coord2(const SliceSpec& s, int iy) {
    return s.min2 + iy * (s.max2 - s.min2) / (s.ny - 1);
}
// Flat sample index of grid point (ix, iy); axis2 varies fastest.
inline size_t slice_index(const SliceSpec& s, int ix, int iy) {
    return static_cast<size_t>(ix) * s.ny + iy;
}

void validate_slice(const SliceSpec& spec, int n_nodes, int node_dim);

// base_state with the two slice coordinates set to the (ix, iy) grid values.
SystemState slice_state(const SliceSpec& spec, int node_dim, int ix, int iy);

// All nx*ny initial states in slice_index order.
std::vector<SystemState> sample_slice(const SliceSpec& spec, int node_dim);

// Kuramoto fingerprints correlate sin(theta); everything else uses component 0.
ObservableKind default_observable(SystemKind kind);

struct SweepOptions {
    int workers = 1;
    std::string checkpoint_dir;        // empty disables checkpointing
    size_t checkpoint_interval = 1024; // completed rows per checkpoint flush
    std::string final_vps_path;        // completed matrix lands here if set
    // Polled periodically; returning false checkpoints and aborts the sweep.
    std::function<bool(size_t done, size_t total)> progress;
};

struct SweepResult {
    VpsMatrix matrix; // nx*ny rows; diverged/degenerate rows are all +inf
    size_t n_diverged = 0;
    size_t n_resumed = 0; // rows restored from a checkpoint
};

// Identifies a sweep setup; a checkpoint is only resumed if it matches.
uint64_t sweep_digest(const SystemModel& model, const SliceSpec& spec,
                      const IntegrationConfig& icfg, const VpsConfig& vcfg,
                      ObservableKind observable);

// Integrates and fingerprints every grid point. Output is bit-identical for
// any worker count. Throws SweepInterrupted after saving a checkpoint when the
// progress callback asks to stop.
SweepResult sweep(const SystemModel& model, const SliceSpec& spec,
                  const IntegrationConfig& icfg, const VpsConfig& vcfg,
                  ObservableKind observable, const SweepOptions& opts);

struct BasinMap {
    int nx = 0, ny = 0;
    int k = 0;
    std::vector<int> label_grid; // [iy * nx + ix]; -1 = sentinel
    int at(int ix, int iy) const { return label_grid[static_cast<size_t>(iy) * nx + ix]; }
};

BasinMap build_basin_map(const SliceSpec& slice, const Clustering& cl);

// CSV, ny lines of nx comma-separated integers, iy = 0 first; -1 = sentinel.
void save_label_grid(const std::string& path, const BasinMap& map);
BasinMap load_label_grid(const std::string& path);

} // namespace chimera
