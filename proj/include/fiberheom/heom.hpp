// heom.hpp — Bounded hierarchy of auxiliary density matrices, the hierarchy
// right-hand side for piecewise-constant Hamiltonians, the fixed-step RK4
// integrator, and trajectory evolution with optional pulse schedules.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fiberheom/analysis.hpp"
#include "fiberheom/control.hpp"
#include "fiberheom/linalg.hpp"
#include "fiberheom/model.hpp"

namespace fiberheom::heom {

using lin::cplx;

struct HierarchyIndex {
    std::vector<int> n;  // one entry per (bath, exponent) mode
    int grade() const;
};

// Indices with sum(n) <= n_c in graded order (grade ascending, first
// coordinate descending within a grade), plus neighbor lookup tables.
// Position 0 is always the all-zeros index holding the physical RDM.
struct HierarchyLayout {
    int n_modes = 0;
    int n_c = 0;
    std::vector<HierarchyIndex> indices;

    std::size_t size() const { return indices.size(); }
    // Position of the index with n_k raised/lowered by one, or -1.
    std::int32_t neighbor_up(std::size_t pos, int mode) const { return up_[pos * n_modes + mode]; }
    std::int32_t neighbor_down(std::size_t pos, int mode) const { return down_[pos * n_modes + mode]; }

    std::vector<std::int32_t> up_, down_;  // filled by enumerate_hierarchy
};

HierarchyLayout enumerate_hierarchy(int n_modes, int n_c);

// All ADMs stored contiguously, 16 complex entries (row-major 4x4) per ADM.
struct HierarchyState {
    const HierarchyLayout* layout = nullptr;
    std::vector<cplx> adms;
    double t = 0.0;

    cplx* adm(std::size_t pos) { return adms.data() + 16 * pos; }
    const cplx* adm(std::size_t pos) const { return adms.data() + 16 * pos; }
    lin::CMatrix rdm() const;  // copy of ADM 0
};

HierarchyState make_initial_state(const HierarchyLayout& layout, const lin::CMatrix& rho0);

struct IntegratorConfig {
    double dt = 1e-3;            // us, base step
    int sample_every = 0;        // steps between samples; 0 = auto (~250 samples)
    int n_c = 10;                // hierarchy truncation level
    double pulse_substep = 0.0;  // us, step inside finite pulses; 0 = auto (tau_p/32)
};

struct numerical_blowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hierarchy right-hand side bound to a layout and bath set. The Hamiltonian is
// piecewise constant (set_hamiltonian switches segments). For every index n:
//
//   d rho_n/dt = -i [H, rho_n] - (sum_k n_k nu_k) rho_n
//                - i sum_k [Q_k, rho_{n+e_k}]
//                - i sum_k n_k ( Re(c_k) [Q_k, rho_{n-e_k}]
//                              + i Im(c_k) {Q_k, rho_{n-e_k}} )
//
// with missing neighbors treated as zero. Diagonal H and Q (the entire
// dephasing family) take an element-wise fast path.
class HeomRhs {
public:
    HeomRhs(const HierarchyLayout& layout, const std::vector<model::BathSpec>& baths);

    void set_hamiltonian(const lin::CMatrix& h);
    const HierarchyLayout& layout() const { return *layout_; }
    int n_modes() const { return static_cast<int>(modes_.size()); }
    bool modes_all_diagonal() const;

    // out must not alias in; both hold layout().size() * 16 entries.
    void operator()(const cplx* in, cplx* out) const;

private:
    struct ModeTerm {
        lin::CMatrix q;
        cplx c;
        cplx nu;
        bool diagonal = false;
        std::array<cplx, 16> raise_coeff;  // -i (q_i - q_j)
        std::array<cplx, 16> lower_coeff;  // -i (Re c (q_i - q_j) + i Im c (q_i + q_j))
    };

    void eval_general(const cplx* in, cplx* out) const;
    void eval_diagonal(const cplx* in, cplx* out) const;

    const HierarchyLayout* layout_;
    std::vector<ModeTerm> modes_;
    std::vector<cplx> damping_;  // per-ADM sum_k n_k nu_k
    lin::CMatrix h_;
    bool h_diagonal_ = true;
    bool all_diagonal_ = true;
    std::array<cplx, 16> h_coeff_{};  // -i (h_i - h_j) for diagonal H
};

struct RkWorkspace {
    std::vector<cplx> k1, k2, k3, k4, stage;
    void resize(std::size_t entries);
};

// Classical fourth-order Runge-Kutta step over the whole hierarchy; advances
// state.t by dt and throws numerical_blowup if any entry leaves the finite
// range.
void step_rk4(const HeomRhs& rhs, HierarchyState& state, double dt, RkWorkspace& ws);
void step_rk4(const HeomRhs& rhs, HierarchyState& state, double dt);

// Integrates the chosen Bell state over [0, total_time], sampling every
// sample_every base steps plus the endpoints, applying the schedule's pulses
// (ideal conjugation or finite rectangles resolved with pulse_substep).
analysis::Trajectory evolve(const model::ModelConfig& cfg, const IntegratorConfig& icfg,
                            double total_time,
                            const control::PulseSequence* schedule = nullptr);

struct ConvergenceReport {
    int n_c_low = 0;
    int n_c_high = 0;
    double sup_concurrence_diff = 0.0;
};

// Runs evolve at n_c and n_c + 2 and reports the sup-norm difference of the
// concurrence traces.
ConvergenceReport convergence_check(const model::ModelConfig& cfg, const IntegratorConfig& icfg,
                                    double total_time);

}  // namespace fiberheom::heom
