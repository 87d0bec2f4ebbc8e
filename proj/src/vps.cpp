#include "chimera/vps.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "chimera/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "VPS binary I/O assumes a little-endian host");

namespace chimera {

namespace {

// Sum over the full window of a[t] * b[(t - tau) mod T], without a modulo in
// the inner loop: b is walked from s0 with a single wrap.
double circular_dot(std::span<const double> a, std::span<const double> b, long tau) {
    const long T = static_cast<long>(a.size());
    const long s0 = ((-tau) % T + T) % T;
    double acc = 0.0;
    const long first = T - s0;
    for (long t = 0; t < first; ++t) acc += a[t] * b[s0 + t];
    for (long t = first; t < T; ++t) acc += a[t] * b[t - first];
    return acc;
}

double linear_dot(std::span<const double> a, std::span<const double> b, long tau) {
    const long T = static_cast<long>(a.size());
    const long lo = std::max<long>(0, tau);
    const long hi = std::min<long>(T - 1, T - 1 + tau);
    double acc = 0.0;
    for (long t = lo; t <= hi; ++t) acc += a[t] * b[t - tau];
    return acc;
}

double sq_norm(std::span<const double> v, long lo, long hi) {
    double acc = 0.0;
    for (long t = lo; t <= hi; ++t) acc += v[t] * v[t];
    return acc;
}

} // namespace

PairAlignment best_lag(std::span<const double> series_i, std::span<const double> series_j,
                       const VpsConfig& cfg) {
    const long T = static_cast<long>(series_i.size());
    if (series_j.size() != series_i.size()) throw ArgumentError("best_lag: length mismatch");
    if (cfg.max_lag < 0) throw ArgumentError("best_lag: max_lag must be >= 0");
    if (cfg.corr_mode == CorrMode::Circular) {
        if (cfg.max_lag >= T) throw ArgumentError("best_lag: max_lag must be < series length");
    } else {
        if (T <= 2L * cfg.max_lag)
            throw ArgumentError("best_lag: series length must exceed 2*max_lag");
    }

    const bool norm = cfg.corr_normalization == CorrNormalization::ZeroMeanUnitNorm;
    std::vector<double> ci, cj;
    std::span<const double> a = series_i, b = series_j;
    double full_norm_a = 0.0, full_norm_b = 0.0;
    if (norm) {
        const double mi = std::accumulate(series_i.begin(), series_i.end(), 0.0) / T;
        const double mj = std::accumulate(series_j.begin(), series_j.end(), 0.0) / T;
        ci.resize(T);
        cj.resize(T);
        for (long t = 0; t < T; ++t) ci[t] = series_i[t] - mi;
        for (long t = 0; t < T; ++t) cj[t] = series_j[t] - mj;
        a = ci;
        b = cj;
        full_norm_a = std::sqrt(sq_norm(a, 0, T - 1));
        full_norm_b = std::sqrt(sq_norm(b, 0, T - 1));
        if (full_norm_a == 0.0 || full_norm_b == 0.0)
            throw DegenerateSignalError("best_lag: constant series cannot be normalized");
    }

    auto corr_at = [&](long tau) -> double {
        if (cfg.corr_mode == CorrMode::Circular) {
            const double r = circular_dot(a, b, tau);
            return norm ? r / (full_norm_a * full_norm_b) : r;
        }
        const double r = linear_dot(a, b, tau);
        if (!norm) return r;
        const long lo = std::max<long>(0, tau);
        const long hi = std::min<long>(T - 1, T - 1 + tau);
        const double den =
            std::sqrt(sq_norm(a, lo, hi)) * std::sqrt(sq_norm(b, lo - tau, hi - tau));
        return den == 0.0 ? 0.0 : r / den;
    };

    // Scan 0, +1, -1, +2, -2, ... with strictly-greater replacement, which
    // realizes the smallest-|tau|-then-positive tie-break.
    PairAlignment best{0, corr_at(0), 0.0};
    for (int l = 1; l <= cfg.max_lag; ++l)
        for (int tau : {l, -l}) {
            const double r = corr_at(tau);
            if (r > best.correlation_at_tau) {
                best.tau_star = tau;
                best.correlation_at_tau = r;
            }
        }
    return best;
}

double alignment_cost(std::span<const double> traj_i, std::span<const double> traj_j,
                      int node_dim, int tau, CorrMode mode) {
    if (node_dim < 1) throw ArgumentError("alignment_cost: node_dim must be >= 1");
    if (traj_i.size() != traj_j.size() || traj_i.size() % node_dim != 0)
        throw ArgumentError("alignment_cost: trajectory shape mismatch");
    const long T = static_cast<long>(traj_i.size()) / node_dim;
    const long atau = std::labs(tau);
    if (atau >= T) throw ArgumentError("alignment_cost: |tau| must be < series length");

    double acc = 0.0;
    long count = 0;
    for (int c = 0; c < node_dim; ++c) {
        const auto a = traj_i.subspan(static_cast<size_t>(c) * T, T);
        const auto b = traj_j.subspan(static_cast<size_t>(c) * T, T);
        if (mode == CorrMode::Circular) {
            const long s0 = ((-static_cast<long>(tau)) % T + T) % T;
            const long first = T - s0;
            for (long t = 0; t < first; ++t) {
                const double d = a[t] - b[s0 + t];
                acc += d * d;
            }
            for (long t = first; t < T; ++t) {
                const double d = a[t] - b[t - first];
                acc += d * d;
            }
            count = T;
        } else {
            const long lo = std::max<long>(0, tau);
            const long hi = std::min<long>(T - 1, T - 1 + static_cast<long>(tau));
            for (long t = lo; t <= hi; ++t) {
                const double d = a[t] - b[t - tau];
                acc += d * d;
            }
            count = hi - lo + 1;
        }
    }
    return acc / count;
}

VpsVector build_vps(const TrajectorySet& traj, const VpsConfig& cfg,
                    ObservableKind observable) {
    const int n = traj.n_nodes;
    if (n < 2) throw ArgumentError("build_vps: need at least 2 nodes");
    const SeriesMatrix obs = observable_series(traj, observable);
    const size_t n_pairs = static_cast<size_t>(n) * (n - 1) / 2;

    VpsVector out;
    out.n_nodes = n;
    out.entries.resize(2 * n_pairs);
    size_t idx = 0;
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n; ++j, ++idx) {
            const PairAlignment pa = best_lag(obs.row(i), obs.row(j), cfg);
            const double cost = alignment_cost(traj.node_block(i), traj.node_block(j),
                                               traj.node_dim, pa.tau_star, cfg.corr_mode);
            out.entries[idx] = static_cast<double>(pa.tau_star);
            out.entries[n_pairs + idx] = cfg.beta * cost;
        }
    return out;
}

double vps_distance(const VpsVector& a, const VpsVector& b) {
    if (a.entries.size() != b.entries.size())
        throw ArgumentError("vps_distance: length mismatch");
    double acc = 0.0;
    for (size_t k = 0; k < a.entries.size(); ++k) {
        const double d = a.entries[k] - b.entries[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

void save_vps_matrix(const std::string& path, const VpsMatrix& m) {
    if (m.data.size() != static_cast<size_t>(m.rows) * m.len)
        throw ArgumentError("save_vps_matrix: shape/data mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(kVpsMagic, 4);
    f.write(reinterpret_cast<const char*>(&m.rows), 4);
    f.write(reinterpret_cast<const char*>(&m.len), 4);
    f.write(reinterpret_cast<const char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!f) throw IoError("write failed: " + path);
}

VpsMatrix load_vps_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    VpsMatrix m;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&m.rows), 4);
    f.read(reinterpret_cast<char*>(&m.len), 4);
    if (!f || std::memcmp(magic, kVpsMagic, 4) != 0)
        throw ValidationError("not a VPS matrix file: " + path);
    m.data.resize(static_cast<size_t>(m.rows) * m.len);
    f.read(reinterpret_cast<char*>(m.data.data()),
           static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!f || f.gcount() != static_cast<std::streamsize>(m.data.size() * sizeof(double)))
        throw ParseError("truncated VPS matrix file: " + path, 0);
    return m;
}

void export_vps_csv(const std::string& path, const VpsMatrix& m) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    char buf[32];
    for (uint32_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        for (uint32_t c = 0; c < m.len; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", row[c]);
            f << (c ? "," : "") << buf;
        }
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace chimera
