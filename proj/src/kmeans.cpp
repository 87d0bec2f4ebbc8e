#include "chimera/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "chimera/error.hpp"
#include "chimera/hash.hpp"
#include "chimera/rng.hpp"

namespace chimera {

namespace {

std::vector<size_t> valid_rows(const VpsMatrix& vm) {
    std::vector<size_t> idx;
    idx.reserve(vm.rows);
    for (size_t r = 0; r < vm.rows; ++r)
        if (!is_sentinel_row(vm.row(r))) idx.push_back(r);
    return idx;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

bool rows_equal(std::span<const double> a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin());
}

// Value hash: collapses -0.0 onto +0.0 so bitwise variants of equal rows
// land in one bucket.
uint64_t row_hash(std::span<const double> row) {
    Hasher h;
    for (double v : row) h.update(v == 0.0 ? 0.0 : v);
    return h.digest();
}

// Number of distinct rows among `valid`, but stops counting at `cap`.
size_t count_distinct_capped(const VpsMatrix& vm, const std::vector<size_t>& valid,
                             size_t cap) {
    std::unordered_map<uint64_t, std::vector<size_t>> buckets;
    size_t distinct = 0;
    for (size_t r : valid) {
        const auto row = vm.row(r);
        auto& bucket = buckets[row_hash(row)];
        bool seen = false;
        for (size_t other : bucket)
            if (rows_equal(row, vm.row(other))) {
                seen = true;
                break;
            }
        if (!seen) {
            bucket.push_back(r);
            if (++distinct >= cap) return distinct;
        }
    }
    return distinct;
}

struct KmeansRun {
    std::vector<int> assign; // per valid-row position
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
};

void seed_kmeanspp(const VpsMatrix& vm, const std::vector<size_t>& valid, int k, Rng& rng,
                   std::vector<std::vector<double>>& centroids) {
    const size_t n = valid.size();
    centroids.assign(k, {});
    const auto first = vm.row(valid[rng.below(n)]);
    centroids[0].assign(first.begin(), first.end());

    std::vector<double> d2(n);
    for (size_t i = 0; i < n; ++i) d2[i] = sq_dist(vm.row(valid[i]), centroids[0]);

    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        long pick = -1, last_pos = -1;
        if (total > 0.0) {
            const double u = rng.uniform01() * total;
            double cum = 0.0;
            for (size_t i = 0; i < n; ++i) {
                if (d2[i] > 0.0) last_pos = static_cast<long>(i);
                cum += d2[i];
                if (u < cum) {
                    pick = static_cast<long>(i);
                    break;
                }
            }
            if (pick < 0) pick = last_pos; // u landed on the rounding edge
        }
        if (pick < 0) pick = static_cast<long>(rng.below(n)); // all points coincide
        const auto row = vm.row(valid[pick]);
        centroids[c].assign(row.begin(), row.end());
        for (size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], sq_dist(vm.row(valid[i]), centroids[c]));
    }
}

// Re-seed every empty cluster on the farthest member of the largest cluster.
bool repair_empty(const VpsMatrix& vm, const std::vector<size_t>& valid,
                  std::vector<int>& assign, std::vector<std::vector<double>>& centroids) {
    const int k = static_cast<int>(centroids.size());
    bool any = false;
    for (;;) {
        std::vector<size_t> counts(k, 0);
        for (int a : assign) ++counts[a];
        int empty = -1;
        for (int c = 0; c < k; ++c)
            if (counts[c] == 0) {
                empty = c;
                break;
            }
        if (empty < 0) return any;
        int big = 0;
        for (int c = 1; c < k; ++c)
            if (counts[c] > counts[big]) big = c;
        long far = -1;
        double far_d = -1.0;
        for (size_t i = 0; i < valid.size(); ++i) {
            if (assign[i] != big) continue;
            const double d = sq_dist(vm.row(valid[i]), centroids[big]);
            if (d > far_d) {
                far_d = d;
                far = static_cast<long>(i);
            }
        }
        assign[far] = empty;
        const auto row = vm.row(valid[far]);
        centroids[empty].assign(row.begin(), row.end());
        any = true;
    }
}

KmeansRun lloyd_run(const VpsMatrix& vm, const std::vector<size_t>& valid, int k, Rng& rng,
                    int max_iters) {
    const size_t n = valid.size();
    KmeansRun run;
    seed_kmeanspp(vm, valid, k, rng, run.centroids);
    run.assign.assign(n, -1);

    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            const auto row = vm.row(valid[i]);
            int best = 0;
            double best_d = sq_dist(row, run.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(row, run.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.assign[i] != best) {
                run.assign[i] = best;
                changed = true;
            }
        }
        const bool repaired = repair_empty(vm, valid, run.assign, run.centroids);
        const size_t len = vm.len;
        for (auto& c : run.centroids) std::fill(c.begin(), c.end(), 0.0);
        std::vector<size_t> counts(k, 0);
        for (size_t i = 0; i < n; ++i) {
            const auto row = vm.row(valid[i]);
            auto& c = run.centroids[run.assign[i]];
            for (size_t e = 0; e < len; ++e) c[e] += row[e];
            ++counts[run.assign[i]];
        }
        for (int c = 0; c < k; ++c)
            for (size_t e = 0; e < len; ++e) run.centroids[c][e] /= counts[c];
        if (!changed && !repaired) break;
    }

    run.inertia = 0.0;
    for (size_t i = 0; i < n; ++i)
        run.inertia += sq_dist(vm.row(valid[i]), run.centroids[run.assign[i]]);
    return run;
}

} // namespace

size_t count_distinct_rows(const VpsMatrix& vm) {
    const auto valid = valid_rows(vm);
    return count_distinct_capped(vm, valid, std::numeric_limits<size_t>::max());
}

Clustering kmeans_cluster(const VpsMatrix& vm, int k, uint64_t seed, int restarts,
                          int max_iters) {
    if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
    if (restarts < 1) throw ArgumentError("kmeans: restarts must be >= 1");
    if (max_iters < 1) throw ArgumentError("kmeans: max_iters must be >= 1");
    const auto valid = valid_rows(vm);
    if (valid.empty()) throw ArgumentError("kmeans: no clusterable rows");
    if (count_distinct_capped(vm, valid, static_cast<size_t>(k)) < static_cast<size_t>(k))
        throw ArgumentError("kmeans: k exceeds the number of distinct rows");

    KmeansRun best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
        KmeansRun run = lloyd_run(vm, valid, k, rng, max_iters);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    Clustering out;
    out.k = k;
    out.seed = seed;
    out.restarts = restarts;
    out.inertia = best.inertia;
    out.centroids = std::move(best.centroids);
    out.labels.assign(vm.rows, -1);
    for (size_t i = 0; i < valid.size(); ++i) out.labels[valid[i]] = best.assign[i];
    return out;
}

ElbowResult select_k_elbow(const VpsMatrix& vm, int k_max, uint64_t seed, int restarts,
                           int max_iters) {
    if (k_max < 3) throw ArgumentError("elbow: k_max must be >= 3");
    const auto valid = valid_rows(vm);
    if (valid.empty()) throw ArgumentError("elbow: no clusterable rows");

    ElbowResult res;
    const size_t distinct = count_distinct_capped(vm, valid, static_cast<size_t>(k_max));
    res.k_max_used = static_cast<int>(std::min<size_t>(distinct, k_max));
    if (res.k_max_used < k_max)
        res.warnings.push_back("k_max capped at " + std::to_string(res.k_max_used) +
                               " distinct rows");

    for (int k = 1; k <= res.k_max_used; ++k)
        res.inertia_curve.push_back(
            kmeans_cluster(vm, k, derive_seed(seed, static_cast<uint64_t>(k)), restarts,
                           max_iters)
                .inertia);

    if (res.k_max_used < 3) {
        res.warnings.push_back("too few distinct rows for the elbow rule; using k = " +
                               std::to_string(res.k_max_used));
        res.k = res.k_max_used;
        return res;
    }

    auto W = [&](int k) { return res.inertia_curve[k - 1]; };
    for (int k = 1; k < res.k_max_used; ++k)
        if (W(k + 1) > W(k))
            res.warnings.push_back("inertia increased from k=" + std::to_string(k) + " to k=" +
                                   std::to_string(k + 1) + "; consider more restarts");

    int best_k = 2;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= res.k_max_used - 1; ++k) {
        const double gain = W(k - 1) - 2.0 * W(k) + W(k + 1);
        if (gain > best_gain) {
            best_gain = gain;
            best_k = k;
        }
    }
    res.k = best_k;
    return res;
}

} // namespace chimera
