#include "chimera/models.hpp"

#include <cmath>
#include <numbers>

#include "chimera/error.hpp"

namespace chimera {

double KuramotoParams::alpha() const { return std::numbers::pi / 2.0 - gamma; }

int node_dim_for(SystemKind kind) {
    switch (kind) {
    case SystemKind::HRDiffusive: return 3;
    case SystemKind::HRElectrochemical: return 3;
    case SystemKind::Kuramoto: return 1;
    case SystemKind::Henon: return 2;
    }
    throw ArgumentError("unknown system kind");
}

SystemModel SystemModel::hr_diffusive(Network net, HRParams p) {
    return SystemModel{SystemKind::HRDiffusive, std::move(net), 3, p, {}, {}, {}};
}

SystemModel SystemModel::hr_electrochemical(Network net, HRParams p, ChemicalParams c) {
    return SystemModel{SystemKind::HRElectrochemical, std::move(net), 3, p, c, {}, {}};
}

SystemModel SystemModel::kuramoto(Network net, KuramotoParams p) {
    return SystemModel{SystemKind::Kuramoto, std::move(net), 1, {}, {}, p, {}};
}

SystemModel SystemModel::henon(Network net, HenonParams p) {
    return SystemModel{SystemKind::Henon, std::move(net), 2, {}, {}, {}, p};
}

std::array<double, 3> hr_local_field(std::span<const double> u, const HRParams& p) {
    const double x = u[0], y = u[1], z = u[2];
    return {y - p.a * x * x * x + p.b * x * x - z + p.i_ext,
            p.c - p.d * x * x - y,
            p.r * (p.s * (x - p.x_rest) - z)};
}

void diffusive_coupling(std::span<const double> state_i, std::span<const double> state_j,
                        std::span<double> out) {
    if (state_i.size() != state_j.size() || out.size() != state_i.size())
        throw ArgumentError("diffusive_coupling: length mismatch");
    for (size_t c = 0; c < out.size(); ++c) out[c] = state_j[c] - state_i[c];
}

std::array<double, 3> electrochemical_coupling(std::span<const double> state_i,
                                               std::span<const double> state_j,
                                               const ChemicalParams& c) {
    const double gate = 1.0 / (1.0 + std::exp(-c.lambda * (state_j[0] - c.theta_syn)));
    return {-c.alpha * (state_i[0] - c.v_syn) * gate, state_j[1] - state_i[1], 0.0};
}

namespace {

void hr_field(const SystemModel& m, std::span<const double> state, std::span<double> deriv) {
    const int n = m.network.n_nodes();
    const bool chem = m.kind == SystemKind::HRElectrochemical;
    const double sigma = m.hr.sigma;

    // The chemical gate depends on x_j only; evaluate it once per node.
    thread_local std::vector<double> gate;
    if (chem) {
        gate.resize(n);
        for (int j = 0; j < n; ++j)
            gate[j] = 1.0 / (1.0 + std::exp(-m.chem.lambda * (state[3 * j] - m.chem.theta_syn)));
    }

    for (int i = 0; i < n; ++i) {
        const auto u = state.subspan(3 * i, 3);
        const auto local = hr_local_field(u, m.hr);
        double cx = 0.0, cy = 0.0, cz = 0.0;
        if (chem) {
            const double drive = -m.chem.alpha * (u[0] - m.chem.v_syn);
            for (int j = 0; j < n; ++j) {
                const double w = m.network.weight(i, j);
                cx += w * (drive * gate[j]);
                cy += w * (state[3 * j + 1] - u[1]);
            }
        } else {
            for (int j = 0; j < n; ++j) {
                const double w = m.network.weight(i, j);
                cx += w * (state[3 * j + 0] - u[0]);
                cy += w * (state[3 * j + 1] - u[1]);
                cz += w * (state[3 * j + 2] - u[2]);
            }
        }
        deriv[3 * i + 0] = local[0] + sigma * cx;
        deriv[3 * i + 1] = local[1] + sigma * cy;
        deriv[3 * i + 2] = local[2] + sigma * cz;
    }
}

// sin(theta_j - theta_i - alpha) = sin(theta_j - alpha) cos(theta_i)
//                                - cos(theta_j - alpha) sin(theta_i),
// so N trig pairs plus two weighted sums replace N^2 sine calls.
void kuramoto_field(const SystemModel& m, std::span<const double> state,
                    std::span<double> deriv) {
    const int n = m.network.n_nodes();
    const double alpha = m.kur.alpha();
    thread_local std::vector<double> sj, cj;
    sj.resize(n);
    cj.resize(n);
    for (int j = 0; j < n; ++j) {
        sj[j] = std::sin(state[j] - alpha);
        cj[j] = std::cos(state[j] - alpha);
    }
    for (int i = 0; i < n; ++i) {
        double as = 0.0, ac = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = m.network.weight(i, j);
            as += w * sj[j];
            ac += w * cj[j];
        }
        deriv[i] = m.kur.sigma * (as * std::cos(state[i]) - ac * std::sin(state[i]));
    }
}

} // namespace

void network_vector_field(const SystemModel& model, std::span<const double> state,
                          std::span<double> deriv) {
    if (state.size() != model.state_size() || deriv.size() != model.state_size())
        throw ArgumentError("network_vector_field: state length mismatch");
    switch (model.kind) {
    case SystemKind::HRDiffusive:
    case SystemKind::HRElectrochemical: hr_field(model, state, deriv); return;
    case SystemKind::Kuramoto: kuramoto_field(model, state, deriv); return;
    case SystemKind::Henon: throw ArgumentError("network_vector_field: Henon is a map");
    }
}

void henon_network_step(const SystemModel& model, std::span<const double> state,
                        std::span<double> next) {
    if (model.kind != SystemKind::Henon)
        throw ArgumentError("henon_network_step: model is not a map");
    if (state.size() != model.state_size() || next.size() != model.state_size())
        throw ArgumentError("henon_network_step: state length mismatch");
    const int n = model.network.n_nodes();
    const double p = model.hen.p;
    thread_local std::vector<double> fx;
    fx.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = state[2 * i], y = state[2 * i + 1];
        fx[i] = 1.0 - p * x * x + y;
    }
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += model.network.weight(i, j) * (fx[j] - fx[i]);
        next[2 * i + 0] = fx[i] + model.hen.sigma * acc;
        next[2 * i + 1] = model.hen.b * state[2 * i];
    }
}

} // namespace chimera
