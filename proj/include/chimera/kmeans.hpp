#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chimera/vps.hpp"

namespace chimera {

// Rows whose entries are all +inf mark diverged/degenerate initial conditions;
// they are skipped by clustering and carry label -1.
inline bool is_sentinel_row(std::span<const double> row) {
    return !row.empty() && !std::isfinite(row[0]);
}

struct Clustering {
    int k = 0;
    std::vector<int> labels; // one per matrix row; -1 on sentinel rows
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0; // within-cluster sum of squared distances
    uint64_t seed = 0;
    int restarts = 1;
};

// Lloyd iterations with k-means++ seeding; the best of `restarts` seeded runs
// (minimal inertia, earliest run on ties) is returned. Assignment ties go to
// the lowest centroid index; empty clusters are repaired by splitting the
// largest cluster at its farthest member. Deterministic given seed.
// Requires k <= number of distinct non-sentinel rows.
Clustering kmeans_cluster(const VpsMatrix& vm, int k, uint64_t seed, int restarts,
                          int max_iters = 100);

size_t count_distinct_rows(const VpsMatrix& vm);

struct ElbowResult {
    int k = 1;
    std::vector<double> inertia_curve; // W(k) for k = 1..k_max_used
    int k_max_used = 0;                // k_max after capping at distinct rows
    std::vector<std::string> warnings;
};

// Runs k = 1..k_max, returns the k maximizing the discrete second difference
// W(k-1) - 2 W(k) + W(k+1) over 2 <= k <= k_max-1 (smallest k on ties).
// k_max is capped at the number of distinct rows; if fewer than 3 remain the
// cap itself is returned with a warning.
ElbowResult select_k_elbow(const VpsMatrix& vm, int k_max, uint64_t seed, int restarts,
                           int max_iters = 100);

} // namespace chimera
