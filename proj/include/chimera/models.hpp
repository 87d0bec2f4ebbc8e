#pragma once

#include <array>
#include <span>
#include <vector>

#include "chimera/network.hpp"

namespace chimera {

enum class SystemKind { HRDiffusive, HRElectrochemical, Kuramoto, Henon };

// Hindmarsh-Rose local constants plus the coupling strength sigma.
struct HRParams {
    double a = 1.0;
    double b = 3.0;
    double c = 1.0;
    double d = 5.0;
    double s = 4.0;
    double r = 0.005;
    double x_rest = -1.6; // x_R
    double i_ext = 3.25;  // I
    double sigma = 0.5;
};

// Chemical synapse constants of the electrochemical coupling.
struct ChemicalParams {
    double alpha = 0.03;
    double v_syn = 2.0;
    double theta_syn = -0.25;
    double lambda = 10.0; // sigmoid steepness, > 0
};

struct KuramotoParams {
    double sigma = 1.0;
    double gamma = 0.025;
    double alpha() const; // pi/2 - gamma
};

struct HenonParams {
    double p = 1.44;
    double b = 0.164;
    double sigma = 0.8; // in [0, 1]
};

// Flat node-major state vector: node i occupies [i*d, (i+1)*d).
// Component order per node: HR (x,y,z), Kuramoto (theta), Henon (x,y).
using SystemState = std::vector<double>;

// One of the four networked systems, bundling local parameters with the
// coupling graph. node_dim is fixed by kind (3, 3, 1, 2).
struct SystemModel {
    SystemKind kind;
    Network network;
    int node_dim;
    HRParams hr;
    ChemicalParams chem;
    KuramotoParams kur;
    HenonParams hen;

    size_t state_size() const { return static_cast<size_t>(network.n_nodes()) * node_dim; }
    bool is_map() const { return kind == SystemKind::Henon; }

    static SystemModel hr_diffusive(Network net, HRParams p);
    static SystemModel hr_electrochemical(Network net, HRParams p, ChemicalParams c);
    static SystemModel kuramoto(Network net, KuramotoParams p);
    static SystemModel henon(Network net, HenonParams p);
};

int node_dim_for(SystemKind kind);

// f of the HR oscillator: (y - a x^3 + b x^2 - z + I,  c - d x^2 - y,
//                          r (s (x - x_R) - z))
std::array<double, 3> hr_local_field(std::span<const double> node_state, const HRParams& p);

// componentwise state_j - state_i
void diffusive_coupling(std::span<const double> state_i, std::span<const double> state_j,
                        std::span<double> out);

// y-diffusion plus sigmoidal chemical drive on x:
//   (-alpha (x_i - V_syn) [1 + exp(-lambda (x_j - theta_syn))]^-1,  y_j - y_i,  0)
std::array<double, 3> electrochemical_coupling(std::span<const double> state_i,
                                               std::span<const double> state_j,
                                               const ChemicalParams& c);

// dx_i = f(x_i) + sigma * sum_j A_ij h(x_i, x_j) for the continuous kinds;
// Kuramoto uses dtheta_i = sigma * sum_j A_ij sin(theta_j - theta_i - alpha).
// Rejects map kinds.
void network_vector_field(const SystemModel& model, std::span<const double> state,
                          std::span<double> deriv);

// x_i' = f_x(x_i,y_i) + sigma * sum_j A_ij (f_x(x_j,y_j) - f_x(x_i,y_i)),
// y_i' = b x_i, with f_x(x,y) = 1 - p x^2 + y. Rejects non-map kinds.
void henon_network_step(const SystemModel& model, std::span<const double> state,
                        std::span<double> next);

} // namespace chimera
