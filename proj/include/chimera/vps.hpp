#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chimera/integrate.hpp"

namespace chimera {

enum class CorrMode { Circular, LinearValid };
enum class CorrNormalization { Raw, ZeroMeanUnitNorm };

struct VpsConfig {
    double beta = 1.0; // weight on the alignment-cost half
    int max_lag = 0;   // lag search bound, in samples; must be < sample count
    CorrMode corr_mode = CorrMode::LinearValid;
    CorrNormalization corr_normalization = CorrNormalization::Raw;
};

inline int default_max_lag(size_t n_samples) { return static_cast<int>(n_samples / 4); }

struct PairAlignment {
    int tau_star = 0;
    double correlation_at_tau = 0.0;
    double cost_at_tau = 0.0;
};

// Fingerprint of one trajectory: the C(N,2) optimal lags tau* in pair order
// (0,1),(0,2),...,(N-2,N-1), then beta * L at those lags in the same order.
struct VpsVector {
    int n_nodes = 0;
    std::vector<double> entries; // length N(N-1)
};

// tau* = argmax over tau in [-max_lag, max_lag] of R(tau) = sum_t s_i(t) s_j(t-tau),
// per corr_mode; ties broken by smallest |tau|, then positive tau.
PairAlignment best_lag(std::span<const double> series_i, std::span<const double> series_j,
                       const VpsConfig& cfg);

// Mean of ||x_i(s) - x_j(s-tau)||^2 over the wrapped window (circular) or the
// overlap (linear-valid). Trajectories are [component][time] contiguous blocks
// of length d*T, matching TrajectorySet node blocks.
double alignment_cost(std::span<const double> traj_i, std::span<const double> traj_j,
                      int node_dim, int tau, CorrMode mode);

VpsVector build_vps(const TrajectorySet& traj, const VpsConfig& cfg, ObservableKind observable);

double vps_distance(const VpsVector& a, const VpsVector& b);

// Row-major stack of VPS vectors (one per initial condition).
struct VpsMatrix {
    uint32_t rows = 0;
    uint32_t len = 0;
    std::vector<double> data;

    std::span<const double> row(size_t r) const {
        return {data.data() + r * static_cast<size_t>(len), static_cast<size_t>(len)};
    }
    std::span<double> row(size_t r) {
        return {data.data() + r * static_cast<size_t>(len), static_cast<size_t>(len)};
    }
};

// Binary layout: "VPS1", u32 rows, u32 len, then rows*len little-endian f64.
inline constexpr char kVpsMagic[4] = {'V', 'P', 'S', '1'};
inline constexpr size_t kVpsHeaderSize = 12;

void save_vps_matrix(const std::string& path, const VpsMatrix& m);
VpsMatrix load_vps_matrix(const std::string& path);
void export_vps_csv(const std::string& path, const VpsMatrix& m);

} // namespace chimera
