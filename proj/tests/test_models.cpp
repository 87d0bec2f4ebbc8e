#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "chimera/error.hpp"
#include "chimera/models.hpp"
#include "chimera/rng.hpp"

using namespace chimera;

namespace {

Network complete_graph(int n, double w) {
    std::vector<double> m(static_cast<size_t>(n) * n, w);
    for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 0.0;
    return Network(n, std::move(m), false, "K" + std::to_string(n));
}

Network empty_graph(int n) {
    return Network(n, std::vector<double>(static_cast<size_t>(n) * n, 0.0), false, "empty");
}

// independently coded right-hand side, kept deliberately different in style
std::array<double, 3> hr_rhs_oracle(double x, double y, double z, const HRParams& p) {
    return {y - p.a * std::pow(x, 3) + p.b * std::pow(x, 2) - z + p.i_ext,
            p.c - p.d * std::pow(x, 2) - y,
            p.r * (p.s * (x - p.x_rest) - z)};
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("HR local field at reference points") {
    HRParams p; // full-model defaults: a=1 b=3 c=1 d=5 s=4 r=0.005 x_R=-1.6 I=3.25
    const auto at_origin = hr_local_field(std::vector<double>{0, 0, 0}, p);
    CHECK(at_origin[0] == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(at_origin[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(at_origin[2] == doctest::Approx(0.032).epsilon(1e-15)); // 0.005*4*1.6

    const auto at_x1 = hr_local_field(std::vector<double>{1, 0, 0}, p);
    CHECK(at_x1[0] == doctest::Approx(5.25).epsilon(1e-15)); // 0-1+3-0+3.25
}

TEST_CASE("HR local field matches an independent evaluator on random states") {
    HRParams p;
    p.x_rest = -0.5 * (1.0 + std::sqrt(5.0));
    p.i_ext = 3.27;
    p.r = 0.017;
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3), z = rng.uniform(-3, 3);
        const auto got = hr_local_field(std::vector<double>{x, y, z}, p);
        const auto want = hr_rhs_oracle(x, y, z, p);
        for (int c = 0; c < 3; ++c)
            CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-13));
    }
}

TEST_CASE("diffusive coupling is the componentwise difference") {
    std::array<double, 3> out{};
    diffusive_coupling(std::vector<double>{0, 0, 0}, std::vector<double>{1, 2, 3}, out);
    CHECK(out == std::array<double, 3>{1, 2, 3});

    diffusive_coupling(std::vector<double>{4, 5, 6}, std::vector<double>{4, 5, 6}, out);
    CHECK(out == std::array<double, 3>{0, 0, 0});

    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        std::vector<double> v{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        std::array<double, 3> uv{}, vu{};
        diffusive_coupling(u, v, uv);
        diffusive_coupling(v, u, vu);
        for (int c = 0; c < 3; ++c) CHECK(uv[c] == -vu[c]); // antisymmetry
    }
}

TEST_CASE("electrochemical coupling reference values") {
    ChemicalParams c; // alpha=0.03 V_syn=2 theta_syn=-0.25 lambda=10

    // x_i at the synaptic reversal potential: no drive at all
    const auto at_vsyn = electrochemical_coupling(std::vector<double>{2.0, 0.3, 0.1},
                                                  std::vector<double>{-1.0, 0.9, 0.2}, c);
    CHECK(at_vsyn[0] == 0.0);
    CHECK(at_vsyn[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(at_vsyn[2] == 0.0);

    // sigmoid midpoint: x_j = theta_syn gives exactly 1/2
    const auto mid = electrochemical_coupling(std::vector<double>{0.0, 0.0, 0.0},
                                              std::vector<double>{-0.25, 0.0, 0.0}, c);
    CHECK(mid[0] == doctest::Approx(0.03).epsilon(1e-15)); // -0.03*(0-2)*0.5

    // saturation: sigmoid -> 1 for x_j far above threshold
    const auto sat = electrochemical_coupling(std::vector<double>{0.5, 1.0, 0.0},
                                              std::vector<double>{100.0, 1.0, 0.0}, c);
    CHECK(sat[0] == doctest::Approx(-c.alpha * (0.5 - c.v_syn)).epsilon(1e-12));
    CHECK(sat[1] == 0.0);

    // the gate stays inside (0,1); in floating point the upper bound is only
    // strict until exp(-lambda(x_j - theta)) underflows below one ulp
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const double xi = rng.uniform(-50, 50), xj = rng.uniform(-3, 3);
        const auto h = electrochemical_coupling(std::vector<double>{xi, 0, 0},
                                                std::vector<double>{xj, 0, 0}, c);
        if (xi != c.v_syn) {
            const double gate = h[0] / (-c.alpha * (xi - c.v_syn));
            CHECK(gate > 0.0);
            CHECK(gate < 1.0);
        }
    }
    for (int t = 0; t < 200; ++t) {
        const double xj = rng.uniform(-100, 100);
        const auto h = electrochemical_coupling(std::vector<double>{0, 0, 0},
                                                std::vector<double>{xj, 0, 0}, c);
        const double gate = h[0] / (-c.alpha * (0 - c.v_syn));
        CHECK(gate >= 0.0);
        CHECK(gate <= 1.0);
    }
}

TEST_CASE("sync manifold: coupling vanishes, derivative equals the local field") {
    SystemModel model = SystemModel::hr_diffusive(complete_graph(4, 1.3), HRParams{});
    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> node{rng.uniform(-2, 2), rng.uniform(-2, 2),
                                       rng.uniform(-2, 2)};
        std::vector<double> state;
        for (int i = 0; i < 4; ++i) state.insert(state.end(), node.begin(), node.end());
        std::vector<double> deriv(state.size());
        network_vector_field(model, state, deriv);
        const auto local = hr_local_field(node, model.hr);
        for (int i = 0; i < 4; ++i)
            for (int cix = 0; cix < 3; ++cix)
                CHECK(deriv[i * 3 + cix] == doctest::Approx(local[cix]).epsilon(1e-14));
    }
}

TEST_CASE("Kuramoto dyad at equal phases") {
    KuramotoParams kp; // gamma = 0.025, sigma = 1
    SystemModel model = SystemModel::kuramoto(complete_graph(2, 1.0), kp);
    std::vector<double> deriv(2);
    network_vector_field(model, std::vector<double>{0.0, 0.0}, deriv);
    const double want = -std::cos(0.025); // sin(-alpha) = -cos(gamma)
    CHECK(deriv[0] == doctest::Approx(want).epsilon(1e-12));
    CHECK(deriv[1] == doctest::Approx(want).epsilon(1e-12));
    CHECK(kp.alpha() == std::numbers::pi / 2 - kp.gamma); // stored relation
}

TEST_CASE("Kuramoto field matches the naive double loop") {
    KuramotoParams kp;
    kp.sigma = 0.7;
    Network net = generate_two_population(3, 0.6, 0.4, 5, true);
    SystemModel model = SystemModel::kuramoto(net, kp);
    Rng rng(31);
    const int n = net.n_nodes();
    for (int t = 0; t < 25; ++t) {
        std::vector<double> theta(n), deriv(n), want(n);
        for (auto& th : theta) th = rng.uniform(0, 2 * std::numbers::pi);
        network_vector_field(model, theta, deriv);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += net.weight(i, j) * std::sin(theta[j] - theta[i] - kp.alpha());
            want[i] = kp.sigma * acc;
        }
        for (int i = 0; i < n; ++i)
            CHECK(deriv[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("HR-diffusive field matches the naive triple loop") {
    HRParams p;
    p.sigma = 0.37;
    Network net = complete_graph(3, 0.0);
    // irregular weights to exercise the adjacency
    std::vector<double> w{0, 1.5, 0.25, 1.5, 0, 2.0, 0.25, 2.0, 0};
    net = Network(3, w, false, "tri");
    SystemModel model = SystemModel::hr_diffusive(net, p);
    Rng rng(43);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> state(9), deriv(9), want(9);
        for (auto& v : state) v = rng.uniform(-2, 2);
        network_vector_field(model, state, deriv);
        for (int i = 0; i < 3; ++i) {
            const auto local =
                hr_local_field(std::span<const double>(state).subspan(i * 3, 3), p);
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 3; ++j)
                    acc += net.weight(i, j) * (state[j * 3 + c] - state[i * 3 + c]);
                want[i * 3 + c] = local[c] + p.sigma * acc;
            }
        }
        for (int k = 0; k < 9; ++k)
            CHECK(deriv[k] == doctest::Approx(want[k]).epsilon(1e-13));
    }
}

TEST_CASE("HR-electrochemical field matches the naive loop") {
    HRParams p;
    p.sigma = 0.5;
    ChemicalParams c;
    Network net = generate_two_population(2, 0.6, 0.4, 9, true);
    SystemModel model = SystemModel::hr_electrochemical(net, p, c);
    const int n = net.n_nodes();
    Rng rng(59);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> state(static_cast<size_t>(3) * n), deriv(state.size()),
            want(state.size());
        for (auto& v : state) v = rng.uniform(-2, 2);
        network_vector_field(model, state, deriv);
        for (int i = 0; i < n; ++i) {
            const auto local =
                hr_local_field(std::span<const double>(state).subspan(i * 3, 3), p);
            std::array<double, 3> acc{0, 0, 0};
            for (int j = 0; j < n; ++j) {
                const auto h = electrochemical_coupling(
                    std::span<const double>(state).subspan(i * 3, 3),
                    std::span<const double>(state).subspan(j * 3, 3), c);
                for (int cc = 0; cc < 3; ++cc) acc[cc] += net.weight(i, j) * h[cc];
            }
            for (int cc = 0; cc < 3; ++cc)
                want[i * 3 + cc] = local[cc] + p.sigma * acc[cc];
        }
        for (size_t k = 0; k < want.size(); ++k)
            CHECK(deriv[k] == doctest::Approx(want[k]).epsilon(1e-13));
    }
}

TEST_CASE("field is linear in the coupling strength") {
    Rng rng(67);
    std::vector<double> state(9);
    for (auto& v : state) v = rng.uniform(-2, 2);

    HRParams p1, p2;
    p1.sigma = 0.2;
    p2.sigma = 0.4;
    Network net = complete_graph(3, 1.0);
    std::vector<double> d0(9), d1(9), d2(9);
    HRParams p0 = p1;
    p0.sigma = 0.0;
    network_vector_field(SystemModel::hr_diffusive(net, p0), state, d0);
    network_vector_field(SystemModel::hr_diffusive(net, p1), state, d1);
    network_vector_field(SystemModel::hr_diffusive(net, p2), state, d2);
    for (int k = 0; k < 9; ++k)
        CHECK(d2[k] - d0[k] == doctest::Approx(2.0 * (d1[k] - d0[k])).epsilon(1e-12));

    KuramotoParams k1, k2;
    k1.sigma = 0.3;
    k2.sigma = 0.6;
    std::vector<double> theta{0.3, 1.2, 5.0}, kd1(3), kd2(3);
    network_vector_field(SystemModel::kuramoto(net, k1), theta, kd1);
    network_vector_field(SystemModel::kuramoto(net, k2), theta, kd2);
    for (int k = 0; k < 3; ++k)
        CHECK(kd2[k] == doctest::Approx(2.0 * kd1[k]).epsilon(1e-12));
}

TEST_CASE("Henon network step reference points") {
    HenonParams hp; // p=1.44 b=0.164 sigma=0.8
    SystemModel model = SystemModel::henon(complete_graph(3, 1.0), hp);

    // identical nodes: coupling cancels, every node maps to (1, 0)
    std::vector<double> state{0, 0, 0, 0, 0, 0}, next(6);
    henon_network_step(model, state, next);
    for (int i = 0; i < 3; ++i) {
        CHECK(next[i * 2 + 0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(next[i * 2 + 1] == 0.0);
    }

    // isolated node: the plain Henon map
    SystemModel iso = SystemModel::henon(empty_graph(2), hp);
    std::vector<double> s2{1.0, 0.0, 0.0, 0.0}, n2(4);
    henon_network_step(iso, s2, n2);
    CHECK(n2[0] == doctest::Approx(-0.44).epsilon(1e-14)); // 1 - 1.44
    CHECK(n2[1] == doctest::Approx(0.164).epsilon(1e-15));
}

TEST_CASE("Henon step matches the naive loop and the sigma=0 uncoupled map") {
    HenonParams hp;
    Network net(2, {0, 0.9, 0.9, 0}, false, "pair");
    SystemModel model = SystemModel::henon(net, hp);
    auto fx = [&](double x, double y) { return 1.0 - hp.p * x * x + y; };
    Rng rng(73);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> state{rng.uniform(-1, 1), rng.uniform(-0.3, 0.3),
                                  rng.uniform(-1, 1), rng.uniform(-0.3, 0.3)};
        std::vector<double> next(4), want(4);
        henon_network_step(model, state, next);
        for (int i = 0; i < 2; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 2; ++j)
                acc += net.weight(i, j) *
                       (fx(state[j * 2], state[j * 2 + 1]) - fx(state[i * 2], state[i * 2 + 1]));
            want[i * 2 + 0] = fx(state[i * 2], state[i * 2 + 1]) + hp.sigma * acc;
            want[i * 2 + 1] = hp.b * state[i * 2];
        }
        for (int k = 0; k < 4; ++k)
            CHECK(next[k] == doctest::Approx(want[k]).epsilon(1e-13));
    }

    HenonParams uncoupled = hp;
    uncoupled.sigma = 0.0;
    SystemModel m0 = SystemModel::henon(net, uncoupled);
    std::vector<double> state{0.3, 0.1, -0.5, 0.05}, next(4);
    henon_network_step(m0, state, next);
    for (int i = 0; i < 2; ++i) {
        CHECK(next[i * 2 + 0] == fx(state[i * 2], state[i * 2 + 1]));
        CHECK(next[i * 2 + 1] == hp.b * state[i * 2]);
    }
}

TEST_CASE("wrong-system calls are rejected") {
    SystemModel hr = SystemModel::hr_diffusive(complete_graph(2, 1.0), HRParams{});
    SystemModel hen = SystemModel::henon(complete_graph(2, 1.0), HenonParams{});
    std::vector<double> s6(6), s4(4);
    CHECK_THROWS_AS(network_vector_field(hen, s4, s4), ArgumentError);
    CHECK_THROWS_AS(henon_network_step(hr, s6, s6), ArgumentError);
    CHECK(node_dim_for(SystemKind::HRDiffusive) == 3);
    CHECK(node_dim_for(SystemKind::HRElectrochemical) == 3);
    CHECK(node_dim_for(SystemKind::Kuramoto) == 1);
    CHECK(node_dim_for(SystemKind::Henon) == 2);
}

} // TEST_SUITE
