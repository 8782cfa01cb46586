// Unit tests for the hierarchy right-hand side, the RK4 stepper, and evolve.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fiberheom/analysis.hpp"
#include "fiberheom/control.hpp"
#include "fiberheom/heom.hpp"
#include "fiberheom/model.hpp"
#include "test_util.hpp"

using namespace fiberheom;
using lin::CMatrix;
using lin::cplx;

namespace {

model::ModelConfig dephasing_config(double eta, double lc_km) {
    model::ModelConfig cfg;
    cfg.fiber.wavelength_nm = 1550.0;
    cfg.fiber.mean_birefringence = 1e-7;
    cfg.fiber.birefringence_std = eta * 1e-7;
    cfg.fiber.correlation_length_km = lc_km;
    cfg.fiber.group_index = 1.5;
    return cfg;
}

// Straightforward CMatrix re-statement of the hierarchy equations, kept
// independent of the production evaluation paths.
std::vector<CMatrix> naive_rhs(const heom::HierarchyLayout& layout, const CMatrix& h,
                               const std::vector<model::BathSpec>& baths,
                               const std::vector<CMatrix>& in) {
    struct Mode {
        CMatrix q;
        cplx c, nu;
    };
    std::vector<Mode> modes;
    for (const auto& b : baths)
        for (const auto& t : b.exponents) modes.push_back({b.coupling, t.c, t.nu});

    const cplx minus_i(0.0, -1.0);
    std::vector<CMatrix> out(layout.size(), CMatrix(4));
    for (std::size_t i = 0; i < layout.size(); ++i) {
        CMatrix acc = minus_i * lin::commutator(h, in[i]);
        cplx damping{};
        for (int k = 0; k < layout.n_modes; ++k)
            damping += static_cast<double>(layout.indices[i].n[k]) * modes[k].nu;
        acc -= damping * in[i];
        for (int k = 0; k < layout.n_modes; ++k) {
            const auto up = layout.neighbor_up(i, k);
            if (up >= 0) acc += minus_i * lin::commutator(modes[k].q, in[up]);
            const auto down = layout.neighbor_down(i, k);
            if (down >= 0) {
                const double nk = layout.indices[i].n[k];
                CMatrix term = modes[k].c.real() * lin::commutator(modes[k].q, in[down]);
                term += cplx(0.0, 1.0) * modes[k].c.imag() *
                        lin::anticommutator(modes[k].q, in[down]);
                acc += (minus_i * nk) * term;
            }
        }
        out[i] = acc;
    }
    return out;
}

std::vector<CMatrix> unpack(const heom::HierarchyState& s) {
    std::vector<CMatrix> out;
    for (std::size_t i = 0; i < s.layout->size(); ++i) {
        CMatrix m(4);
        std::copy(s.adm(i), s.adm(i) + 16, m.data());
        out.push_back(m);
    }
    return out;
}

}  // namespace

TEST_CASE("rhs without coupling reduces to the free Liouville term") {
    model::ModelConfig cfg = dephasing_config(0.0, 0.1);
    cfg.omega1 = 10.0;
    cfg.omega2 = 10.0;
    const auto baths = model::build_baths(cfg);
    const auto layout = heom::enumerate_hierarchy(2, 2);
    heom::HeomRhs rhs(layout, baths);
    const CMatrix h = model::build_system_hamiltonian(cfg);
    rhs.set_hamiltonian(h);

    heom::HierarchyState state =
        heom::make_initial_state(layout, model::bell_state(model::BellState::PhiPlus));
    std::vector<cplx> out(state.adms.size());
    rhs(state.adms.data(), out.data());

    CMatrix d0(4);
    std::copy(out.begin(), out.begin() + 16, d0.data());
    const CMatrix expected = cplx(0.0, -1.0) * lin::commutator(h, state.rdm());
    CHECK(lin::max_abs_diff(d0, expected) <= 1e-14);
    for (std::size_t e = 16; e < out.size(); ++e) CHECK(std::abs(out[e]) == 0.0);
}

TEST_CASE("single-mode level-1 source term is the bare commutator") {
    // c = 1, H = 0: d rho_(1)/dt = -i [Q, rho_0]
    model::BathSpec bath;
    bath.coupling = lin::kron(lin::pauli_z(), lin::identity2());
    bath.exponents = {{cplx(1.0, 0.0), cplx(2.0, 0.0)}};
    const auto layout = heom::enumerate_hierarchy(1, 1);
    heom::HeomRhs rhs(layout, {bath});
    rhs.set_hamiltonian(CMatrix(4));

    heom::HierarchyState state =
        heom::make_initial_state(layout, model::bell_state(model::BellState::PhiPlus));
    std::vector<cplx> out(state.adms.size());
    rhs(state.adms.data(), out.data());

    CMatrix d0(4), d1(4);
    std::copy(out.begin(), out.begin() + 16, d0.data());
    std::copy(out.begin() + 16, out.begin() + 32, d1.data());
    CHECK(d0.max_abs() == 0.0);
    const CMatrix expected = cplx(0.0, -1.0) * lin::commutator(bath.coupling, state.rdm());
    CHECK(lin::max_abs_diff(d1, expected) <= 1e-14);
}

TEST_CASE("rhs matches the naive restatement on random hierarchies") {
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (int trial = 0; trial < 8; ++trial) {
        // alternate between diagonal couplings, complex amplitudes, and dense Q
        std::vector<model::BathSpec> baths;
        model::BathSpec b1;
        b1.coupling = lin::kron(lin::pauli_z(), lin::identity2());
        b1.exponents = {{cplx(u(rng), trial % 2 ? u(rng) : 0.0), cplx(std::abs(u(rng)) + 0.1, 0.0)}};
        baths.push_back(b1);
        model::BathSpec b2;
        b2.coupling = trial % 3 == 0 ? test_util::random_hermitian(rng, 4)
                                     : lin::kron(lin::identity2(), lin::pauli_z());
        b2.exponents = {{cplx(u(rng), u(rng)), cplx(std::abs(u(rng)) + 0.1, u(rng))}};
        baths.push_back(b2);

        const auto layout = heom::enumerate_hierarchy(2, 3);
        heom::HeomRhs rhs(layout, baths);
        const CMatrix h = trial % 2 ? test_util::random_hermitian(rng, 4)
                                    : CMatrix(4, {1, 0, 0, 0, 0, 2, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0});
        rhs.set_hamiltonian(h);

        heom::HierarchyState state = heom::make_initial_state(layout, CMatrix::identity(4));
        for (auto& z : state.adms) z = cplx(u(rng), u(rng));

        std::vector<cplx> out(state.adms.size());
        rhs(state.adms.data(), out.data());
        const std::vector<CMatrix> expected = naive_rhs(layout, h, baths, unpack(state));
        for (std::size_t i = 0; i < layout.size(); ++i) {
            CMatrix got(4);
            std::copy(out.begin() + 16 * i, out.begin() + 16 * (i + 1), got.data());
            CHECK(lin::max_abs_diff(got, expected[i]) <= 1e-12);
        }
    }
}

TEST_CASE("step_rk4 leaves the state unchanged under a zero right-hand side") {
    model::ModelConfig cfg = dephasing_config(0.0, 0.1);
    cfg.omega1 = 0.0;
    cfg.omega2 = 0.0;
    const auto layout = heom::enumerate_hierarchy(2, 1);
    heom::HeomRhs rhs(layout, model::build_baths(cfg));
    rhs.set_hamiltonian(CMatrix(4));
    heom::HierarchyState state =
        heom::make_initial_state(layout, model::bell_state(model::BellState::PhiPlus));
    const std::vector<cplx> before = state.adms;
    heom::step_rk4(rhs, state, 1e-3);
    CHECK(state.adms == before);
    CHECK(state.t == doctest::Approx(1e-3));
}

TEST_CASE("step_rk4 tracks a pure unitary phase to fourth order") {
    const auto layout = heom::enumerate_hierarchy(1, 0);
    model::BathSpec bath;
    bath.coupling = lin::kron(lin::pauli_z(), lin::identity2());
    bath.exponents = {{cplx(0.0, 0.0), cplx(1.0, 0.0)}};
    heom::HeomRhs rhs(layout, {bath});
    const CMatrix h(4, {10, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -10});
    rhs.set_hamiltonian(h);

    CMatrix rho0(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho0(i, j) = 0.25;  // |++><++|

    auto phase_error = [&](double dt, int steps) {
        heom::HierarchyState state = heom::make_initial_state(layout, rho0);
        for (int s = 0; s < steps; ++s) heom::step_rk4(rhs, state, dt);
        const double t = steps * dt;
        // element (0,1) rotates at the (0,1) gap of H: 10 rad/us
        const cplx expected01 = 0.25 * std::exp(cplx(0.0, -10.0 * t));
        return std::abs(state.rdm()(0, 1) - expected01);
    };

    // local phase error is theta^5/120 per step (theta = 10 dt): the
    // accumulated error over 1000 steps stays within a small multiple of it
    const double err = phase_error(1e-3, 1000);
    const double per_step = std::pow(10.0 * 1e-3, 5) / 120.0;
    CHECK(err <= 2.0 * 1000 * 0.25 * per_step);

    // fourth-order convergence: halving dt shrinks the error ~16x
    const double err_half = phase_error(5e-4, 2000);
    CHECK(err / err_half > 12.0);
    CHECK(err / err_half < 20.0);
}

TEST_CASE("halving dt moves the final concurrence by less than 1e-8") {
    const model::ModelConfig cfg = dephasing_config(0.1, 0.1);
    heom::IntegratorConfig icfg;
    icfg.dt = 1e-3;
    const double total = 5.0;
    const double c1 = heom::evolve(cfg, icfg, total).concurrences.back();
    icfg.dt = 5e-4;
    const double c2 = heom::evolve(cfg, icfg, total).concurrences.back();
    CHECK(std::abs(c1 - c2) <= 1e-8);
}

TEST_CASE("free evolution keeps the Bell state maximally entangled") {
    const model::ModelConfig cfg = dephasing_config(0.0, 0.1);
    heom::IntegratorConfig icfg;
    const analysis::Trajectory traj = heom::evolve(cfg, icfg, 25.0);
    for (double c : traj.concurrences) CHECK(c == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(traj.times.size() >= 2);
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        CHECK(traj.times[i] > traj.times[i - 1]);
        CHECK(traj.distances[i] == doctest::Approx(traj.v_f * traj.times[i]).epsilon(1e-14));
    }
}

TEST_CASE("evolve matches the dephasing oracle at eta=0.1, L_c=100 m") {
    const model::ModelConfig cfg = dephasing_config(0.1, 0.1);
    const model::DerivedParams d = model::derive_params(cfg.fiber);
    heom::IntegratorConfig icfg;
    const analysis::Trajectory traj = heom::evolve(cfg, icfg, 25.0);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double oracle = analysis::dephasing_oracle(0.1, d.gamma, traj.times[i]);
        max_dev = std::max(max_dev, std::abs(traj.concurrences[i] - oracle));
    }
    CHECK(max_dev <= 1e-3);

    // conservation at every sample
    for (const CMatrix& rho : traj.rdms) {
        CHECK(std::abs(rho.trace() - cplx(1.0)) <= 1e-8);
        CHECK(rho.hermiticity_defect() <= 1e-8);
        const lin::HermitianEig eig = lin::hermitian_eig(rho);
        CHECK(eig.values.front() >= -1e-6);
    }
}

TEST_CASE("an oversized step raises a numerical blowup naming the time") {
    const model::ModelConfig cfg = dephasing_config(0.1, 0.01);  // gamma = 20
    heom::IntegratorConfig icfg;
    icfg.dt = 1.0;
    CHECK_THROWS_AS(heom::evolve(cfg, icfg, 50.0), heom::numerical_blowup);
    try {
        heom::evolve(cfg, icfg, 50.0);
    } catch (const heom::numerical_blowup& e) {
        CHECK(std::string(e.what()).find("t = ") != std::string::npos);
    }
}

TEST_CASE("convergence_check self-convergence") {
    heom::IntegratorConfig icfg;

    const model::ModelConfig free_cfg = dephasing_config(0.0, 0.1);
    CHECK(heom::convergence_check(free_cfg, icfg, 5.0).sup_concurrence_diff == 0.0);

    const model::ModelConfig cfg = dephasing_config(0.1, 0.1);
    const heom::ConvergenceReport report = heom::convergence_check(cfg, icfg, 10.0);
    CHECK(report.n_c_low == 10);
    CHECK(report.n_c_high == 12);
    CHECK(report.sup_concurrence_diff <= 1e-6);

    // strongly non-Markovian shallow-hierarchy case: only reported, no threshold
    heom::IntegratorConfig shallow;
    shallow.n_c = 4;
    const model::ModelConfig hard = dephasing_config(0.2, 1.0);
    const heom::ConvergenceReport exploratory = heom::convergence_check(hard, shallow, 10.0);
    CHECK(exploratory.sup_concurrence_diff >= 0.0);
    CHECK(std::isfinite(exploratory.sup_concurrence_diff));
}

TEST_CASE("CPMG and UDD evolutions coincide for N in {1, 2}") {
    const model::ModelConfig cfg = dephasing_config(0.1, 0.05);
    heom::IntegratorConfig icfg;
    for (int n : {1, 2}) {
        const auto cpmg = control::make_sequence(control::SequenceKind::CPMG, n, 2.0);
        const auto udd = control::make_sequence(control::SequenceKind::UDD, n, 2.0);
        const auto t1 = heom::evolve(cfg, icfg, 2.0, &cpmg);
        const auto t2 = heom::evolve(cfg, icfg, 2.0, &udd);
        REQUIRE(t1.concurrences.size() == t2.concurrences.size());
        for (std::size_t i = 0; i < t1.concurrences.size(); ++i) {
            CHECK(std::abs(t1.concurrences[i] - t2.concurrences[i]) <= 1e-12);
        }
    }
}
