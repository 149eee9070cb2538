#include "kamnf/torus_check.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kamnf {

SeedFlowEvaluator::SeedFlowEvaluator(const GevreyProfile& f, const std::vector<double>& omega,
                                     double eps, int mode_cap)
    : cap_(mode_cap), grid_(12 * mode_cap + 8), eps_(eps), omega_(omega) {
    f_grid_.assign(static_cast<std::size_t>(grid_), cplx{0, 0});
    for (int j = 0; j < grid_; ++j) {
        const double x = 2.0 * M_PI * j / grid_;
        cplx v{0, 0};
        for (Mode m = -f.cap; m <= f.cap; ++m)
            v += f.fhat(m) * cplx{static_cast<real_t>(std::cos(m * x)),
                                  static_cast<real_t>(std::sin(m * x))};
        f_grid_[static_cast<std::size_t>(j)] = v;
    }
    modes_grid_.assign(static_cast<std::size_t>((2 * cap_ + 1) * grid_), cplx{0, 0});
    for (Mode n = -cap_; n <= cap_; ++n)
        for (int j = 0; j < grid_; ++j) {
            const double x = 2.0 * M_PI * j / grid_;
            modes_grid_[static_cast<std::size_t>((n + cap_) * grid_ + j)] =
                cplx{static_cast<real_t>(std::cos(n * x)), static_cast<real_t>(std::sin(n * x))};
        }
}

void SeedFlowEvaluator::gradient_bar_pert(const std::vector<cplx>& q,
                                          std::vector<cplx>& out) const {
    const std::size_t modes = static_cast<std::size_t>(2 * cap_ + 1);
    out.assign(modes, cplx{0, 0});
    if (eps_ == 0) return;
    // u(x_j), then P_j = f_j u^3 conj(u)^2, then project: dH/dqbar_n = 3 eps P^(n)
    for (int j = 0; j < grid_; ++j) {
        cplx u{0, 0};
        for (std::size_t n = 0; n < modes; ++n)
            u += q[n] * modes_grid_[n * static_cast<std::size_t>(grid_) +
                                    static_cast<std::size_t>(j)];
        const cplx ub = std::conj(u);
        const cplx p = f_grid_[static_cast<std::size_t>(j)] * u * u * u * ub * ub;
        for (std::size_t n = 0; n < modes; ++n)
            out[n] += p * std::conj(modes_grid_[n * static_cast<std::size_t>(grid_) +
                                                static_cast<std::size_t>(j)]);
    }
    const real_t scale = static_cast<real_t>(3.0 * eps_ / grid_);
    for (auto& g : out) g *= scale;
}

double SeedFlowEvaluator::energy(const std::vector<cplx>& q) const {
    const std::size_t modes = static_cast<std::size_t>(2 * cap_ + 1);
    double e = 0;
    for (std::size_t n = 0; n < modes; ++n)
        e += omega_[n] * static_cast<double>(std::norm(q[n]));
    if (eps_ == 0) return e;
    double pert = 0;
    for (int j = 0; j < grid_; ++j) {
        cplx u{0, 0};
        for (std::size_t n = 0; n < modes; ++n)
            u += q[n] * modes_grid_[n * static_cast<std::size_t>(grid_) +
                                    static_cast<std::size_t>(j)];
        const double u2 = static_cast<double>(std::norm(u));
        pert += static_cast<double>(f_grid_[static_cast<std::size_t>(j)].real()) * u2 * u2 * u2;
    }
    return e + eps_ * pert / grid_;
}

namespace {

void unpack(const std::vector<double>& y, std::vector<cplx>& q) {
    const std::size_t modes = y.size() / 2;
    q.resize(modes);
    for (std::size_t i = 0; i < modes; ++i)
        q[i] = cplx{static_cast<real_t>(y[2 * i]), static_cast<real_t>(y[2 * i + 1])};
}

void pack(const std::vector<cplx>& q, std::vector<double>& y) {
    y.resize(2 * q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        y[2 * i] = static_cast<double>(q[i].real());
        y[2 * i + 1] = static_cast<double>(q[i].imag());
    }
}

// Term-list evaluator for generator flows: frozen actions folded into the
// coefficient, gradient via a guarded division.
struct CompiledHamiltonian {
    struct CTerm {
        cplx coeff;
        std::vector<std::pair<int, int>> k, kp;  // (index n+cap, exponent)
    };
    int cap = 0;
    std::vector<CTerm> cterms;

    CompiledHamiltonian(const Hamiltonian& plain, const TorusSpec& I0, int mode_cap)
        : cap(mode_cap) {
        for (const auto& [m, c] : plain.terms()) {
            if (m.cls() != 0)
                throw MixedClassInput("compiled evaluator needs plain input: " + m.id());
            CTerm t;
            t.coeff = c;
            for (const auto& [n, e] : m.a.entries())
                for (int i = 0; i < e; ++i)
                    t.coeff *= cplx{static_cast<real_t>(I0.action(n)), 0};
            for (const auto& [n, e] : m.k.entries()) t.k.push_back({n + cap, e});
            for (const auto& [n, e] : m.kp.entries()) t.kp.push_back({n + cap, e});
            cterms.push_back(std::move(t));
        }
    }

    static cplx ipow(cplx b, int e) {
        cplx r{1, 0};
        while (e-- > 0) r *= b;
        return r;
    }

    void gradient_bar(const std::vector<cplx>& q, std::vector<cplx>& out) const {
        const std::size_t modes = static_cast<std::size_t>(2 * cap + 1);
        out.assign(modes, cplx{0, 0});
        std::vector<cplx> qb(modes);
        for (std::size_t i = 0; i < modes; ++i) qb[i] = std::conj(q[i]);
        for (const auto& t : cterms) {
            cplx prod = t.coeff;
            for (const auto& [i, e] : t.k) prod *= ipow(q[static_cast<std::size_t>(i)], e);
            for (const auto& [i, e] : t.kp) prod *= ipow(qb[static_cast<std::size_t>(i)], e);
            for (const auto& [i, e] : t.kp) {
                const cplx d = qb[static_cast<std::size_t>(i)];
                if (std::abs(d) > 1e-100) {
                    out[static_cast<std::size_t>(i)] += static_cast<real_t>(e) * prod / d;
                } else {
                    cplx partial = t.coeff;
                    for (const auto& [i2, e2] : t.k)
                        partial *= ipow(q[static_cast<std::size_t>(i2)], e2);
                    for (const auto& [i2, e2] : t.kp)
                        partial *= ipow(qb[static_cast<std::size_t>(i2)], i2 == i ? e2 - 1 : e2);
                    out[static_cast<std::size_t>(i)] += static_cast<real_t>(e) * partial;
                }
            }
        }
    }
};

}  // namespace

std::vector<cplx> apply_transformation(const std::vector<Hamiltonian>& generators,
                                       std::vector<cplx> q, const TorusSpec& I0, int mode_cap,
                                       bool forward, double flow_tol) {
    if (generators.empty()) return q;
    OdeOptions opt;
    opt.rel_tol = flow_tol;
    opt.abs_tol = flow_tol * 1e-2;
    opt.h_init = 0.1;

    auto flow_of = [&](const Hamiltonian& f_tilde, double time_dir, std::vector<cplx>& point) {
        const Hamiltonian plain = expand_j(physical_generator(f_tilde));
        CompiledHamiltonian ch(plain, I0, mode_cap);
        std::vector<double> y;
        pack(point, y);
        std::vector<cplx> qq, g;
        OdeRhs rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dy) {
            unpack(yy, qq);
            ch.gradient_bar(qq, g);
            dy.resize(yy.size());
            const cplx iu{0, static_cast<real_t>(time_dir)};
            for (std::size_t i = 0; i < g.size(); ++i) {
                const cplx v = iu * g[i];
                dy[2 * i] = static_cast<double>(v.real());
                dy[2 * i + 1] = static_cast<double>(v.imag());
            }
        };
        rk45_integrate(rhs, 0.0, 1.0, y, opt);
        unpack(y, point);
    };

    if (forward) {
        for (std::size_t s = generators.size(); s-- > 0;) flow_of(generators[s], +1.0, q);
    } else {
        for (std::size_t s = 0; s < generators.size(); ++s) flow_of(generators[s], -1.0, q);
    }
    return q;
}

std::vector<cplx> torus_point(const TorusSpec& I0, std::uint64_t phase_seed) {
    std::vector<cplx> q(static_cast<std::size_t>(2 * I0.cap + 1));
    const double golden = 0.6180339887498949;
    for (Mode n = -I0.cap; n <= I0.cap; ++n) {
        double u;
        if (phase_seed == 0) {
            u = std::fmod(golden * (n + I0.cap + 1), 1.0);
        } else {
            std::uint64_t h = phase_seed ^ (0x9e3779b97f4a7c15ull *
                                            static_cast<std::uint64_t>(n + I0.cap + 1));
            h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
            h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
            u = static_cast<double>((h ^ (h >> 31)) >> 11) * 0x1.0p-53;
        }
        const double phi = 2.0 * M_PI * u;
        const double amp = std::sqrt(I0.action(n));
        q[static_cast<std::size_t>(n + I0.cap)] = cplx{static_cast<real_t>(amp * std::cos(phi)),
                                                       static_cast<real_t>(amp * std::sin(phi))};
    }
    return q;
}

TrajectoryRecord integrate_record(const SeedFlowEvaluator& flow, const std::vector<cplx>& q0,
                                  const TorusSpec& torus, const TorusCheckOptions& opt) {
    const int cap = flow.cap();
    const std::size_t modes = static_cast<std::size_t>(2 * cap + 1);
    TrajectoryRecord rec;
    rec.window_margin = 1e300;

    std::vector<double> act0(modes);
    for (std::size_t n = 0; n < modes; ++n) act0[n] = static_cast<double>(std::norm(q0[n]));
    double e0 = 0;

    auto record_sample = [&](double t, const std::vector<cplx>& q) {
        rec.times.push_back(t);
        std::vector<double> acts(modes);
        for (std::size_t n = 0; n < modes; ++n) acts[n] = static_cast<double>(std::norm(q[n]));
        const double e = flow.energy(q);
        if (rec.times.size() == 1) e0 = e;
        rec.energy.push_back(e);
        for (std::size_t n = 0; n < modes; ++n) {
            rec.action_drift = std::max(rec.action_drift, std::abs(acts[n] - act0[n]));
            const Mode mode = static_cast<Mode>(static_cast<int>(n) - cap);
            const double amp = std::sqrt(std::max(acts[n], 0.0));
            const double base = std::exp(-torus.r * weight_pow(mode, torus.theta));
            if (amp < 0.5 * base || amp > 2.0 * base) rec.window_ok = false;
            if (amp > 0) {
                const double lo = std::log(amp / (0.5 * base));
                const double hi = std::log((2.0 * base) / amp);
                rec.window_margin = std::min({rec.window_margin, lo, hi});
            }
        }
        rec.energy_rel_drift =
            std::max(rec.energy_rel_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
        rec.actions.push_back(std::move(acts));
    };

    std::vector<double> y;
    pack(q0, y);

    if (opt.use_midpoint) {
        std::vector<cplx> qv, g;
        OdeRhs lab = [&](double, const std::vector<double>& yy, std::vector<double>& dy) {
            unpack(yy, qv);
            flow.gradient_bar_pert(qv, g);
            dy.resize(yy.size());
            for (std::size_t n = 0; n < modes; ++n) {
                const cplx qdot =
                    cplx{0, 1} * (static_cast<real_t>(flow.omega()[n]) * qv[n] + g[n]);
                dy[2 * n] = static_cast<double>(qdot.real());
                dy[2 * n + 1] = static_cast<double>(qdot.imag());
            }
        };
        auto observe = [&](double t, const std::vector<double>& yy) {
            std::vector<cplx> q;
            unpack(yy, q);
            record_sample(t, q);
        };
        implicit_midpoint_integrate(lab, 0.0, opt.T, opt.midpoint_h, y, 1e-14, 100, observe,
                                    opt.sample_dt);
        return rec;
    }

    // Interaction picture: q_n = e^{i w_n t} v_n; the linear rotation is
    // applied exactly and the integrator only sees the eps-small field.
    std::vector<cplx> qq(modes), g(modes), rot(modes), v(modes);
    auto rotate = [&](double t, const std::vector<cplx>& vv, std::vector<cplx>& q) {
        for (std::size_t n = 0; n < modes; ++n) {
            const double ph = flow.omega()[n] * t;
            rot[n] = cplx{static_cast<real_t>(std::cos(ph)), static_cast<real_t>(std::sin(ph))};
            q[n] = rot[n] * vv[n];
        }
    };
    OdeRhs rhs = [&](double t, const std::vector<double>& yy, std::vector<double>& dy) {
        unpack(yy, v);
        rotate(t, v, qq);
        flow.gradient_bar_pert(qq, g);
        dy.resize(yy.size());
        for (std::size_t n = 0; n < modes; ++n) {
            const cplx vdot = cplx{0, 1} * std::conj(rot[n]) * g[n];
            dy[2 * n] = static_cast<double>(vdot.real());
            dy[2 * n + 1] = static_cast<double>(vdot.imag());
        }
    };
    auto observe = [&](double t, const std::vector<double>& yy) {
        unpack(yy, v);
        rotate(t, v, qq);
        record_sample(t, qq);
    };

    OdeOptions oopt;
    oopt.rel_tol = opt.integrator_tol * 1e-7;
    oopt.abs_tol = oopt.rel_tol * 1e-2;
    oopt.h_init = 1e-2;
    rk45_integrate(rhs, 0.0, opt.T, y, oopt, &rec.stats, observe, opt.sample_dt);
    return rec;
}

TorusCheckResult check_torus(const RunResult& run, const GevreyProfile& f, double eps,
                             const TorusCheckOptions& opt) {
    const int cap = run.state.mode_cap;
    const std::size_t modes = static_cast<std::size_t>(2 * cap + 1);
    // The original system carries the potential the run actually used (V*).
    std::vector<double> omega(modes);
    for (Mode n = -cap; n <= cap; ++n)
        omega[static_cast<std::size_t>(n + cap)] =
            static_cast<double>(n) * n + run.v_star[static_cast<std::size_t>(n + run.omega.cap())];
    SeedFlowEvaluator flow(f, omega, eps, cap);

    const std::vector<cplx> q_nf = torus_point(run.state.torus, opt.phase_seed);
    const std::vector<cplx> q_transformed = apply_transformation(
        run.state.generators, q_nf, run.state.torus, cap, /*forward=*/true, opt.flow_tol);

    TorusCheckResult res;
    res.transformed = integrate_record(flow, q_transformed, run.state.torus, opt);
    res.untransformed = integrate_record(flow, q_nf, run.state.torus, opt);
    res.energy_ok = res.transformed.energy_rel_drift <= 10.0 * opt.integrator_tol &&
                    res.untransformed.energy_rel_drift <= 10.0 * opt.integrator_tol;
    res.drift_pair_ok = res.transformed.action_drift <= res.untransformed.action_drift;
    res.drift_abs_ok = res.transformed.action_drift <= 1e-4;
    res.window_ok = res.transformed.window_ok;
    return res;
}

std::string trajectory_csv(const TrajectoryRecord& rec, int mode_cap) {
    std::ostringstream os;
    os << "t";
    for (Mode n = -mode_cap; n <= mode_cap; ++n) os << ",I_" << n;
    os << ",energy\n";
    char buf[64];
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", rec.times[i]);
        os << buf;
        for (double a : rec.actions[i]) {
            std::snprintf(buf, sizeof buf, ",%.17g", a);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g", rec.energy[i]);
        os << buf << '\n';
    }
    return os.str();
}

}  // namespace kamnf
