// heom.cpp — hierarchy enumeration, right-hand side, RK4 stepping, and
// trajectory evolution.

#include "fiberheom/heom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fiberheom::heom {

int HierarchyIndex::grade() const {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

namespace {

void gen_grade(int modes_left, int remaining, std::vector<int>& prefix,
               std::vector<HierarchyIndex>& out) {
    if (modes_left == 1) {
        prefix.push_back(remaining);
        out.push_back({prefix});
        prefix.pop_back();
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        prefix.push_back(v);
        gen_grade(modes_left - 1, remaining - v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

HierarchyLayout enumerate_hierarchy(int n_modes, int n_c) {
    if (n_modes < 1) throw std::invalid_argument("enumerate_hierarchy: n_modes must be >= 1");
    if (n_c < 0) throw std::invalid_argument("enumerate_hierarchy: n_c must be >= 0");

    HierarchyLayout layout;
    layout.n_modes = n_modes;
    layout.n_c = n_c;
    std::vector<int> prefix;
    for (int g = 0; g <= n_c; ++g) {
        gen_grade(n_modes, g, prefix, layout.indices);
    }

    std::map<std::vector<int>, std::int32_t> pos;
    for (std::size_t i = 0; i < layout.indices.size(); ++i) {
        pos[layout.indices[i].n] = static_cast<std::int32_t>(i);
    }

    layout.up_.assign(layout.indices.size() * n_modes, -1);
    layout.down_.assign(layout.indices.size() * n_modes, -1);
    for (std::size_t i = 0; i < layout.indices.size(); ++i) {
        std::vector<int> probe = layout.indices[i].n;
        const int grade = layout.indices[i].grade();
        for (int k = 0; k < n_modes; ++k) {
            if (grade + 1 <= n_c) {
                probe[k] += 1;
                layout.up_[i * n_modes + k] = pos.at(probe);
                probe[k] -= 1;
            }
            if (probe[k] > 0) {
                probe[k] -= 1;
                layout.down_[i * n_modes + k] = pos.at(probe);
                probe[k] += 1;
            }
        }
    }
    return layout;
}

lin::CMatrix HierarchyState::rdm() const {
    lin::CMatrix rho(4);
    std::copy(adms.begin(), adms.begin() + 16, rho.data());
    return rho;
}

HierarchyState make_initial_state(const HierarchyLayout& layout, const lin::CMatrix& rho0) {
    if (rho0.dim() != 4) {
        throw std::invalid_argument("make_initial_state: initial RDM must be 4x4");
    }
    HierarchyState state;
    state.layout = &layout;
    state.adms.assign(layout.size() * 16, cplx{});
    std::copy(rho0.data(), rho0.data() + 16, state.adms.begin());
    state.t = 0.0;
    return state;
}

namespace {

constexpr cplx kMinusI{0.0, -1.0};

// 4x4 row-major complex matrix product, out = a * b (out distinct from both).
inline void mul4(const cplx* a, const cplx* b, cplx* out) {
    for (int i = 0; i < 4; ++i) {
        const cplx a0 = a[4 * i], a1 = a[4 * i + 1], a2 = a[4 * i + 2], a3 = a[4 * i + 3];
        for (int j = 0; j < 4; ++j) {
            out[4 * i + j] = a0 * b[j] + a1 * b[4 + j] + a2 * b[8 + j] + a3 * b[12 + j];
        }
    }
}

}  // namespace

HeomRhs::HeomRhs(const HierarchyLayout& layout, const std::vector<model::BathSpec>& baths)
    : layout_(&layout) {
    // modes ordered bath-major: all exponents of bath 0, then bath 1, ...
    for (const model::BathSpec& bath : baths) {
        bath.validate();
        for (const model::ExponentTerm& term : bath.exponents) {
            ModeTerm mode;
            mode.q = bath.coupling;
            mode.c = term.c;
            mode.nu = term.nu;
            mode.diagonal = bath.coupling.is_diagonal(0.0);
            if (mode.diagonal) {
                double qd[4];
                for (int i = 0; i < 4; ++i) qd[i] = bath.coupling(i, i).real();
                for (int i = 0; i < 4; ++i) {
                    for (int j = 0; j < 4; ++j) {
                        const double gap = qd[i] - qd[j];
                        const double sum = qd[i] + qd[j];
                        mode.raise_coeff[4 * i + j] = kMinusI * gap;
                        mode.lower_coeff[4 * i + j] =
                            kMinusI * (mode.c.real() * gap + cplx(0.0, 1.0) * mode.c.imag() * sum);
                    }
                }
            }
            modes_.push_back(std::move(mode));
        }
    }
    if (static_cast<int>(modes_.size()) != layout.n_modes) {
        throw std::invalid_argument(
            "HeomRhs: bath exponent count does not match the hierarchy layout (" +
            std::to_string(modes_.size()) + " modes vs layout " +
            std::to_string(layout.n_modes) + ")");
    }

    damping_.resize(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        cplx acc{};
        for (int k = 0; k < layout.n_modes; ++k) {
            acc += static_cast<double>(layout.indices[i].n[k]) * modes_[k].nu;
        }
        damping_[i] = acc;
    }

    set_hamiltonian(lin::CMatrix(4));
}

void HeomRhs::set_hamiltonian(const lin::CMatrix& h) {
    if (h.dim() != 4) throw std::invalid_argument("HeomRhs: Hamiltonian must be 4x4");
    if (!h.is_hermitian(1e-10)) {
        throw std::invalid_argument("HeomRhs: Hamiltonian must be Hermitian to 1e-10");
    }
    h_ = h;
    h_diagonal_ = h.is_diagonal(0.0);
    if (h_diagonal_) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                h_coeff_[4 * i + j] = kMinusI * (h(i, i).real() - h(j, j).real());
    }
    all_diagonal_ = h_diagonal_;
    for (const ModeTerm& mode : modes_) all_diagonal_ = all_diagonal_ && mode.diagonal;
}

bool HeomRhs::modes_all_diagonal() const {
    for (const ModeTerm& mode : modes_) {
        if (!mode.diagonal) return false;
    }
    return true;
}

void HeomRhs::operator()(const cplx* in, cplx* out) const {
    if (all_diagonal_) {
        eval_diagonal(in, out);
    } else {
        eval_general(in, out);
    }
}

void HeomRhs::eval_diagonal(const cplx* in, cplx* out) const {
    const std::size_t n_adm = layout_->size();
    const int m = layout_->n_modes;
    const std::int32_t* up = layout_->up_.data();
    const std::int32_t* down = layout_->down_.data();

    for (std::size_t i = 0; i < n_adm; ++i) {
        const cplx* src = in + 16 * i;
        cplx* dst = out + 16 * i;
        const cplx damp = damping_[i];
        for (int e = 0; e < 16; ++e) dst[e] = (h_coeff_[e] - damp) * src[e];

        for (int k = 0; k < m; ++k) {
            const ModeTerm& mode = modes_[k];
            const std::int32_t ju = up[i * m + k];
            if (ju >= 0) {
                const cplx* nb = in + 16 * ju;
                for (int e = 0; e < 16; ++e) dst[e] += mode.raise_coeff[e] * nb[e];
            }
            const std::int32_t jd = down[i * m + k];
            if (jd >= 0) {
                const double nk = layout_->indices[i].n[k];
                const cplx* nb = in + 16 * jd;
                for (int e = 0; e < 16; ++e) dst[e] += nk * mode.lower_coeff[e] * nb[e];
            }
        }
    }
}

void HeomRhs::eval_general(const cplx* in, cplx* out) const {
    const std::size_t n_adm = layout_->size();
    const int m = layout_->n_modes;
    const cplx* h = h_.data();
    cplx t1[16], t2[16];

    for (std::size_t i = 0; i < n_adm; ++i) {
        const cplx* src = in + 16 * i;
        cplx* dst = out + 16 * i;
        const cplx damp = damping_[i];

        // -i [H, rho] - damping * rho
        mul4(h, src, t1);
        mul4(src, h, t2);
        for (int e = 0; e < 16; ++e) {
            const cplx comm = t1[e] - t2[e];
            dst[e] = cplx(comm.imag(), -comm.real()) - damp * src[e];
        }

        for (int k = 0; k < m; ++k) {
            const ModeTerm& mode = modes_[k];
            const std::int32_t ju = layout_->up_[i * m + k];
            if (ju >= 0) {
                const cplx* nb = in + 16 * ju;
                if (mode.diagonal) {
                    for (int e = 0; e < 16; ++e) dst[e] += mode.raise_coeff[e] * nb[e];
                } else {
                    mul4(mode.q.data(), nb, t1);
                    mul4(nb, mode.q.data(), t2);
                    for (int e = 0; e < 16; ++e) {
                        const cplx comm = t1[e] - t2[e];
                        dst[e] += cplx(comm.imag(), -comm.real());
                    }
                }
            }
            const std::int32_t jd = layout_->down_[i * m + k];
            if (jd >= 0) {
                const double nk = layout_->indices[i].n[k];
                const cplx* nb = in + 16 * jd;
                if (mode.diagonal) {
                    for (int e = 0; e < 16; ++e) dst[e] += nk * mode.lower_coeff[e] * nb[e];
                } else {
                    mul4(mode.q.data(), nb, t1);
                    mul4(nb, mode.q.data(), t2);
                    // -i n (Re c [Q, x] + i Im c {Q, x})
                    for (int e = 0; e < 16; ++e) {
                        const cplx comm = t1[e] - t2[e];
                        const cplx anti = t1[e] + t2[e];
                        dst[e] += kMinusI * nk *
                                  (mode.c.real() * comm + cplx(0.0, 1.0) * mode.c.imag() * anti);
                    }
                }
            }
        }
    }
}

void RkWorkspace::resize(std::size_t entries) {
    k1.assign(entries, cplx{});
    k2.assign(entries, cplx{});
    k3.assign(entries, cplx{});
    k4.assign(entries, cplx{});
    stage.assign(entries, cplx{});
}

void step_rk4(const HeomRhs& rhs, HierarchyState& state, double dt, RkWorkspace& ws) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be > 0");
    const std::size_t n = state.adms.size();
    if (n != rhs.layout().size() * 16) {
        throw std::invalid_argument("step_rk4: state size does not match the hierarchy layout");
    }
    if (ws.k1.size() != n) ws.resize(n);

    cplx* y = state.adms.data();
    rhs(y, ws.k1.data());
    for (std::size_t e = 0; e < n; ++e) ws.stage[e] = y[e] + 0.5 * dt * ws.k1[e];
    rhs(ws.stage.data(), ws.k2.data());
    for (std::size_t e = 0; e < n; ++e) ws.stage[e] = y[e] + 0.5 * dt * ws.k2[e];
    rhs(ws.stage.data(), ws.k3.data());
    for (std::size_t e = 0; e < n; ++e) ws.stage[e] = y[e] + dt * ws.k3[e];
    rhs(ws.stage.data(), ws.k4.data());

    const double w = dt / 6.0;
    bool finite = true;
    for (std::size_t e = 0; e < n; ++e) {
        y[e] += w * (ws.k1[e] + 2.0 * ws.k2[e] + 2.0 * ws.k3[e] + ws.k4[e]);
        finite = finite && std::isfinite(y[e].real()) && std::isfinite(y[e].imag());
    }
    state.t += dt;
    if (!finite) {
        std::ostringstream msg;
        msg << "step_rk4: non-finite auxiliary matrix entry at t = " << state.t
            << " us (dt = " << dt << "); the step size is too large for the model rates";
        throw numerical_blowup(msg.str());
    }
}

void step_rk4(const HeomRhs& rhs, HierarchyState& state, double dt) {
    RkWorkspace ws;
    step_rk4(rhs, state, dt, ws);
}

namespace {

struct PulseEvent {
    double t = 0.0;
    enum Kind { Instant, Enter, Exit } kind = Instant;
};

}  // namespace

analysis::Trajectory evolve(const model::ModelConfig& cfg, const IntegratorConfig& icfg,
                            double total_time, const control::PulseSequence* schedule) {
    if (!(total_time > 0.0)) throw std::invalid_argument("evolve: total_time must be > 0");
    if (!(icfg.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (icfg.n_c < 0) throw std::invalid_argument("evolve: n_c must be >= 0");

    const model::DerivedParams derived = model::derive_params(cfg.fiber);
    const std::vector<model::BathSpec> baths = model::build_baths(cfg);
    int n_modes = 0;
    for (const model::BathSpec& b : baths) n_modes += static_cast<int>(b.exponents.size());

    const HierarchyLayout layout = enumerate_hierarchy(n_modes, icfg.n_c);
    HeomRhs rhs(layout, baths);
    const lin::CMatrix h_free = model::build_system_hamiltonian(cfg);

    // Pure-dephasing structure: a diagonal H commutes with every diagonal
    // coupling superoperator, so its phase factor can be split off each step
    // and applied exactly. RK4 then only sees the bath terms, which removes
    // the Hamiltonian's phase dissipation from the fixed-step integration.
    const bool phase_split = h_free.is_diagonal(0.0) && rhs.modes_all_diagonal();
    const lin::CMatrix h_rk4 = phase_split ? lin::CMatrix(4) : h_free;
    rhs.set_hamiltonian(h_rk4);

    std::array<double, 16> h_gaps{};
    if (phase_split) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                h_gaps[4 * i + j] = h_free(i, i).real() - h_free(j, j).real();
    }
    double mask_dt = -1.0;
    std::array<cplx, 16> phase_mask{};
    auto apply_phase = [&](HierarchyState& s, double h) {
        if (h != mask_dt) {
            for (int e = 0; e < 16; ++e) phase_mask[e] = std::exp(cplx(0.0, -h_gaps[e] * h));
            mask_dt = h;
        }
        for (cplx* block = s.adms.data(); block != s.adms.data() + s.adms.size(); block += 16) {
            for (int e = 0; e < 16; ++e) block[e] *= phase_mask[e];
        }
    };

    HierarchyState state = make_initial_state(layout, model::bell_state(cfg.initial_state));

    const long steps = std::max<long>(1, static_cast<long>(std::ceil(total_time / icfg.dt - 1e-12)));
    auto grid_time = [&](long k) { return k >= steps ? total_time : k * icfg.dt; };
    const long sample_every =
        icfg.sample_every > 0 ? icfg.sample_every : std::max<long>(1, steps / 250);

    // Pulse events, snapped to base-grid boundaries when within 1e-9 us so a
    // pulse nominally on the grid does not create a sliver step.
    std::vector<PulseEvent> events;
    lin::CMatrix h_pulse;
    double substep = 0.0;
    if (schedule != nullptr && schedule->n_pulses > 0) {
        const bool finite = schedule->mode == control::PulseMode::Finite;
        if (finite) {
            substep = icfg.pulse_substep > 0.0 ? icfg.pulse_substep : schedule->tau_p / 32.0;
            if (substep > icfg.dt) {
                throw std::invalid_argument("evolve: pulse_substep must be <= dt");
            }
            h_pulse = h_free + schedule->amplitude * control::control_operator();
            for (double tc : schedule->times) {
                events.push_back({tc - 0.5 * schedule->tau_p, PulseEvent::Enter});
                events.push_back({tc + 0.5 * schedule->tau_p, PulseEvent::Exit});
            }
        } else {
            for (double tc : schedule->times) events.push_back({tc, PulseEvent::Instant});
        }
        for (PulseEvent& ev : events) {
            const long k = std::lround(ev.t / icfg.dt);
            if (k >= 0 && k <= steps && std::abs(ev.t - grid_time(k)) < 1e-9) {
                ev.t = grid_time(k);
            }
        }
        std::sort(events.begin(), events.end(),
                  [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
        if (events.front().t <= 0.0 || events.back().t >= total_time) {
            throw std::invalid_argument(
                "evolve: schedule does not fit strictly inside (0, total_time)");
        }
    }

    analysis::Trajectory traj;
    traj.v_f = derived.v_f;
    int pulse_count = 0;

    auto sample = [&](double t) {
        const lin::CMatrix rho = state.rdm();
        if (!rho.all_finite() || rho.max_abs() > 2.0) {
            std::ostringstream msg;
            msg << "evolve: reduced density matrix left the physical range at t = " << t
                << " us (max entry " << rho.max_abs() << "); the step size is too large for "
                << "the model rates";
            throw numerical_blowup(msg.str());
        }
        const double tr_err = std::abs(rho.trace() - cplx(1.0, 0.0));
        if (tr_err > 1e-8) {
            std::ostringstream msg;
            msg << "evolve: RDM trace drifted by " << tr_err << " at t = " << t << " us";
            throw numerical_blowup(msg.str());
        }
        const double herm = rho.hermiticity_defect();
        if (herm > 1e-8) {
            std::ostringstream msg;
            msg << "evolve: RDM hermiticity defect " << herm << " at t = " << t << " us";
            throw numerical_blowup(msg.str());
        }
        traj.times.push_back(t);
        traj.distances.push_back(model::time_to_distance(t, derived.v_f));
        traj.concurrences.push_back(analysis::concurrence(rho));
        traj.rdms.push_back(rho);
        traj.pulses_applied.push_back(pulse_count);
    };

    RkWorkspace ws;
    ws.resize(state.adms.size());
    bool in_pulse = false;

    auto integrate_span = [&](double a, double b) {
        if (b - a <= 1e-15) {
            state.t = b;
            return;
        }
        if (in_pulse) {
            const long nsub = std::max<long>(1, static_cast<long>(std::ceil((b - a) / substep - 1e-12)));
            const double h = (b - a) / static_cast<double>(nsub);
            for (long s = 0; s < nsub; ++s) step_rk4(rhs, state, h, ws);
        } else {
            step_rk4(rhs, state, b - a, ws);
            if (phase_split) apply_phase(state, b - a);
        }
        state.t = b;
    };

    sample(0.0);
    std::size_t next_event = 0;
    for (long k = 0; k < steps; ++k) {
        const double tb = grid_time(k + 1);
        double cur = grid_time(k);
        while (next_event < events.size() && events[next_event].t <= tb + 1e-15) {
            const PulseEvent& ev = events[next_event];
            integrate_span(cur, ev.t);
            switch (ev.kind) {
                case PulseEvent::Instant:
                    control::apply_ideal_pulse(state);
                    ++pulse_count;
                    break;
                case PulseEvent::Enter:
                    rhs.set_hamiltonian(h_pulse);
                    in_pulse = true;
                    break;
                case PulseEvent::Exit:
                    rhs.set_hamiltonian(h_rk4);
                    in_pulse = false;
                    ++pulse_count;
                    break;
            }
            cur = ev.t;
            ++next_event;
        }
        integrate_span(cur, tb);
        if ((k + 1) % sample_every == 0 || k + 1 == steps) sample(tb);
    }
    return traj;
}

ConvergenceReport convergence_check(const model::ModelConfig& cfg, const IntegratorConfig& icfg,
                                    double total_time) {
    IntegratorConfig deeper = icfg;
    deeper.n_c = icfg.n_c + 2;
    const analysis::Trajectory base = evolve(cfg, icfg, total_time);
    const analysis::Trajectory refined = evolve(cfg, deeper, total_time);

    ConvergenceReport report;
    report.n_c_low = icfg.n_c;
    report.n_c_high = deeper.n_c;
    const std::size_t n = std::min(base.concurrences.size(), refined.concurrences.size());
    for (std::size_t i = 0; i < n; ++i) {
        report.sup_concurrence_diff = std::max(
            report.sup_concurrence_diff,
            std::abs(base.concurrences[i] - refined.concurrences[i]));
    }
    return report;
}

}  // namespace fiberheom::heom
