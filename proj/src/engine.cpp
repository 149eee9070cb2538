#include "kamnf/engine.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kamnf {

namespace {

cplx frozen_action_product(const ExponentVector& a, const TorusSpec& I0) {
    cplx prod{1, 0};
    for (const auto& [n, e] : a.entries())
        for (int i = 0; i < e; ++i) prod *= cplx{static_cast<real_t>(I0.action(n)), 0};
    return prod;
}

}  // namespace

FrequencyShift frequency_shift(const Hamiltonian& r1_res, const TorusSpec& I0, int mode_cap) {
    FrequencyShift fs;
    fs.shift.assign(static_cast<std::size_t>(2 * mode_cap + 1), 0.0);
    for (const auto& [m, c] : r1_res.terms()) {
        if (m.cls() != 1 || !m.k.empty() || !m.kp.empty())
            throw MixedClassInput("frequency_shift expects resonant class-1 terms, got " +
                                  m.id());
        const cplx v = c * frozen_action_product(m.a, I0);
        const Mode mode = m.jfactors[0];
        fs.shift[static_cast<std::size_t>(mode + mode_cap)] += static_cast<double>(v.real());
        fs.imag_defect = std::max(fs.imag_defect, static_cast<double>(std::abs(v.imag())));
    }
    for (double s : fs.shift) fs.max_abs = std::max(fs.max_abs, std::abs(s));
    return fs;
}

Hamiltonian physical_generator(const Hamiltonian& f_tilde) {
    Hamiltonian g = f_tilde;
    g *= cplx{static_cast<real_t>(-0.5), 0};
    return g;
}

void kam_step(KamState& state, const EngineOptions& opt) {
    const int s = state.s;
    const StepParams p = schedule_at(state.schedule, s);
    const double theta = state.schedule.theta;
    const NormWeights exit_w{p.rho_next, p.mu_next, theta};

    TelemetryRow row;
    row.step = s;
    row.rho_s = p.rho;
    row.mu_s = p.mu;
    row.delta_s = p.delta;
    row.eps_s_target = p.eps_target;
    row.n_terms = state.r.n_terms();

    // (1) resonant projection of the class-0/1 parts
    Hamiltonian r0 = state.r.class_part(0);
    Hamiltonian r1 = state.r.class_part(1);
    Hamiltonian r2 = state.r.class_part(2);
    ResonantSplit rs0 = resonant_project(r0);
    ResonantSplit rs1 = resonant_project(r1);

    // [R0] is a constant on phase space; it moves into the normal form and
    // drops out of the vector field. Logged, not carried.
    const cplx res0_value = eval(rs0.res, {}, 0, state.torus);
    state.dropped_constant_mass += static_cast<double>(std::abs(res0_value));

    const FrequencyShift fs = frequency_shift(rs1.res, state.torus, state.mode_cap);
    row.max_freq_shift = fs.max_abs;

    // (2) truncation partition of the nonresonant terms (Eq.-098 criterion):
    // heavy monomials already weigh below the step target and are deferred.
    const double threshold = truncation_threshold(state.schedule, s);
    Hamiltonian solved0(state.mode_cap, state.degree_cap);
    Hamiltonian solved1(state.mode_cap, state.degree_cap);
    Hamiltonian deferred(state.mode_cap, state.degree_cap);
    auto partition = [&](const Hamiltonian& src, Hamiltonian& dst_solved) {
        for (const auto& [m, c] : src.terms()) {
            const double mstar = static_cast<double>(momentum_star(m));
            const double lhs = rearrangement(m).sum_pow(theta, 2) +
                               (mstar > 0 ? std::pow(mstar, theta) : 0.0);
            if (lhs <= threshold)
                dst_solved.add(m, c);
            else
                deferred.add(m, c);
        }
    };
    partition(rs0.nonres, solved0);
    partition(rs1.nonres, solved1);
    row.n_solved = solved0.n_terms() + solved1.n_terms();
    row.n_deferred = deferred.n_terms();

    // coefficient-mass conservation of the partition
    {
        const double in_mass = rs0.nonres.coeff_mass() + rs1.nonres.coeff_mass();
        const double out_mass =
            solved0.coeff_mass() + solved1.coeff_mass() + deferred.coeff_mass();
        if (std::abs(in_mass - out_mass) > 1e-12 * std::max(1.0, in_mass))
            throw Error("truncation partition lost coefficient mass");
    }

    // (3) homological solve with divisor audit
    FrequencyVector freq = state.normal.freq;
    freq.set_gamma(state.schedule.gamma);
    SolveResult sol = solve(solved0, solved1, freq, opt.divisor_floor_abs);
    row.min_divisor = sol.min_abs_divisor;
    if (opt.collect_divisor_reports)
        for (auto& rep : sol.reports) state.divisor_log.push_back(rep);
    (void)mode_cutoff(state.schedule, s, state.mode_cap);  // recorded via telemetry consumers

    // (4) new Hamiltonian, Lie series regrouped around the homological
    // identity {N,F} = -(solved part), which holds exactly by construction:
    //   R+ = D + sum_{j>=1} [ K^(j)/(j+1)! + Q^(j)/j! ] + R2,
    // with K = -(solved), Q = R0 + R1 + R2 (all plain).
    BracketOptions bopt;
    bopt.drop_tol = opt.drop_tol;
    bopt.ledger_weights = exit_w;

    Hamiltonian f_plain = expand_j(sol.generator);
    Hamiltonian k_chain = expand_j(solved0) ;
    k_chain += expand_j(solved1);
    k_chain *= cplx{-1, 0};
    Hamiltonian q_chain = expand_j(r0);
    q_chain += expand_j(r1);
    Hamiltonian r2_plain = expand_j(r2);
    q_chain += r2_plain;

    Hamiltonian rplus_plain = expand_j(deferred);
    rplus_plain += r2_plain;

    std::array<double, 3> tails{0, 0, 0};
    const double tol = opt.lie_tol_factor * p.eps_target;
    double prev_norm = -1;
    int growing = 0;
    double factorial = 1.0;  // j!
    for (int j = 1; j <= opt.lie_order_cap; ++j) {
        BracketResult kb = bracket(k_chain, f_plain, bopt);
        BracketResult qb = bracket(q_chain, f_plain, bopt);
        k_chain = std::move(kb.value);
        q_chain = std::move(qb.value);
        factorial *= j;
        const double kfact = factorial * (j + 1);  // (j+1)!
        for (int c = 0; c < 3; ++c)
            tails[static_cast<std::size_t>(c)] +=
                kb.tail_norm_by_class[static_cast<std::size_t>(c)] / kfact +
                qb.tail_norm_by_class[static_cast<std::size_t>(c)] / factorial;

        Hamiltonian term_k = k_chain;
        term_k *= cplx{static_cast<real_t>(1.0 / kfact), 0};
        Hamiltonian term_q = q_chain;
        term_q *= cplx{static_cast<real_t>(1.0 / factorial), 0};
        const double tn =
            std::max(plus_norm(term_k, exit_w).max, plus_norm(term_q, exit_w).max);
        rplus_plain += term_k;
        rplus_plain += term_q;
        row.lie_orders_used = j;

        if (tn < tol) {
            double tail = tn;
            if (prev_norm > 0 && tn > 0) {
                const double ratio = tn / prev_norm;
                if (ratio < 1.0) tail = tn * ratio / (1.0 - ratio);
            }
            tails[0] += tail;
            break;
        }
        if (prev_norm >= 0 && tn >= prev_norm)
            ++growing;
        else
            growing = 0;
        if (growing >= 3)
            throw NoDecay("kam_step Lie series failed to decay at order " + std::to_string(j));
        if (j == opt.lie_order_cap) tails[0] += tn;
        prev_norm = tn;
    }

    {
        const auto pruned = rplus_plain.prune(opt.drop_tol, exit_w);
        for (int c = 0; c < 3; ++c) tails[static_cast<std::size_t>(c)] += pruned[static_cast<std::size_t>(c)];
    }

    // (5) reclassification
    Hamiltonian rplus = split(rplus_plain);
    {
        const auto pruned = rplus.prune(opt.drop_tol, exit_w);
        for (int c = 0; c < 3; ++c) tails[static_cast<std::size_t>(c)] += pruned[static_cast<std::size_t>(c)];
    }

    // (6) frequency update omega_{n+} = n^2 + vtilde_n + shift_n; the [R1]
    // constant -sum_m I_m(0) shift_m drops with [R0].
    double r1_const = 0;
    for (Mode n = -state.mode_cap; n <= state.mode_cap; ++n)
        r1_const -= state.torus.action(n) * fs.shift[static_cast<std::size_t>(n + state.mode_cap)];
    state.dropped_constant_mass += std::abs(r1_const);
    for (Mode n = -state.mode_cap; n <= state.mode_cap; ++n)
        state.normal.freq.shift_vtilde(n, fs.shift[static_cast<std::size_t>(n + state.mode_cap)]);

    // (7) exit certification at the step-(s+1) weights
    const PlusNorm pn = plus_norm(rplus, exit_w);
    row.norm_R0_plus = pn.r0;
    row.norm_R1_plus = pn.r1;
    row.norm_R2_plus = pn.r2;
    row.tail_norm = tails[0] + tails[1] + tails[2];
    if (opt.certify) {
        if (pn.r0 > p.eps_target)
            throw CertificationFailure("R0 exit bound at step " + std::to_string(s), pn.r0,
                                       p.eps_target);
        if (pn.r1 > std::pow(p.eps_target, 0.6))
            throw CertificationFailure("R1 exit bound at step " + std::to_string(s), pn.r1,
                                       std::pow(p.eps_target, 0.6));
        if (pn.r2 > (1.0 + p.d_exit) * state.schedule.eps0)
            throw CertificationFailure("R2 exit bound at step " + std::to_string(s), pn.r2,
                                       (1.0 + p.d_exit) * state.schedule.eps0);
        if (fs.max_abs > std::pow(p.eps_target, 0.5))
            throw CertificationFailure("frequency shift bound at step " + std::to_string(s),
                                       fs.max_abs, std::pow(p.eps_target, 0.5));
    }

    for (int c = 0; c < 3; ++c) state.cumulative_tail[static_cast<std::size_t>(c)] += tails[static_cast<std::size_t>(c)];
    state.generators.push_back(sol.generator);
    state.telemetry.push_back(row);
    state.r = std::move(rplus);
    state.s = s + 1;
}

FrequencyVector sample_omega(std::uint64_t rng_seed, double amplitude, int freq_cap, double gamma,
                             int support_cap, int coeff_cap, int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        FrequencyVector omega(freq_cap, gamma);
        for (Mode n = -freq_cap; n <= freq_cap; ++n) {
            // per-(attempt, mode) hash, deterministic and order-free
            std::uint64_t h = rng_seed;
            h ^= 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt + 1);
            h ^= 0xc2b2ae3d27d4eb4full * static_cast<std::uint64_t>(n + freq_cap + 1);
            h += 0x165667b19e3779f9ull;
            h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
            h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
            h ^= h >> 31;
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            omega.set_vtilde(n, amplitude * (2.0 * u - 1.0));
        }
        DiophantineResult res = diophantine_check(omega, gamma, support_cap, coeff_cap);
        if (res.ok) return omega;
    }
    throw NoConvergence("no Diophantine frequency vector found in " + std::to_string(max_tries) +
                        " tries; shrink gamma or the enumeration caps");
}

namespace {

RunResult run_once(const RunInputs& in) {
    RunResult out;
    out.omega = in.omega;

    Schedule sch = in.schedule;
    sch.eta0 = 1.0 - in.omega.max_abs_vtilde();
    out.warnings = validate_schedule(sch);

    FrequencyVector potential(in.omega.cap(), in.omega.gamma());
    for (Mode n = -in.omega.cap(); n <= in.omega.cap(); ++n)
        potential.set_vtilde(n, in.potential_override
                                    ? (*in.potential_override)[static_cast<std::size_t>(
                                          n + in.omega.cap())]
                                    : in.omega.vtilde(n));

    if (in.check_diophantine)
        out.dioph = diophantine_check(potential, in.omega.gamma(), in.dioph_support_cap,
                                      in.dioph_coeff_cap);

    const NormWeights entry_w{sch.rho0, sch.mu0, sch.theta};
    Seed seed = build_seed(in.f, potential, in.eps, in.mode_cap, in.degree_cap);
    out.seed_cert = seed_norm_certificate(seed.r, entry_w, in.f, in.eps);

    KamState state;
    state.schedule = sch;
    state.normal = seed.normal;
    state.normal.freq.set_gamma(sch.gamma);
    state.torus = TorusSpec::standard(sch.r, sch.theta, in.mode_cap);
    state.mode_cap = in.mode_cap;
    state.degree_cap = in.degree_cap;
    state.r = split(seed.r);

    out.seed_norms = plus_norm(state.r, entry_w);
    if (in.engine.certify) {
        if (out.seed_norms.r0 > sch.eps0)
            throw CertificationFailure("seed R0 entry bound", out.seed_norms.r0, sch.eps0);
        if (out.seed_norms.r1 > std::pow(sch.eps0, 0.6))
            throw CertificationFailure("seed R1 entry bound", out.seed_norms.r1,
                                       std::pow(sch.eps0, 0.6));
        if (out.seed_norms.r2 > sch.eps0)
            throw CertificationFailure("seed R2 entry bound", out.seed_norms.r2, sch.eps0);
    }

    for (int s = 1; s <= in.steps; ++s) kam_step(state, in.engine);

    // final remainder bound at the last exit weights
    if (in.steps > 0) {
        const StepParams last = schedule_at(sch, in.steps);
        const PlusNorm pn =
            plus_norm(state.r, NormWeights{last.rho_next, last.mu_next, sch.theta});
        out.final_r2_plus = pn.r2;
        out.final_r2_allowed = 7.0 / 6.0 * sch.eps0;
        if (in.engine.certify && pn.r2 > out.final_r2_allowed)
            throw CertificationFailure("final R2 bound", pn.r2, out.final_r2_allowed);
    }

    out.v_star.assign(static_cast<std::size_t>(2 * in.omega.cap() + 1), 0.0);
    for (Mode n = -in.omega.cap(); n <= in.omega.cap(); ++n)
        out.v_star[static_cast<std::size_t>(n + in.omega.cap())] = potential.vtilde(n);
    out.state = std::move(state);
    return out;
}

}  // namespace

RunResult run_pipeline(const RunInputs& in) {
    RunResult result = run_once(in);
    if (!in.invert_frequencies) return result;

    // Picard iteration V <- V - (vtilde_final(V) - omega); the frequency map
    // is evaluated by re-running the whole pipeline at the trial potential.
    RunInputs trial = in;
    trial.invert_frequencies = false;
    trial.check_diophantine = false;
    std::vector<double> v = result.v_star;
    const int cap = in.omega.cap();
    RunResult last = std::move(result);
    for (int it = 1; it <= in.picard.max_outer; ++it) {
        double resid = 0;
        for (Mode n = -cap; n <= cap; ++n) {
            const std::size_t i = static_cast<std::size_t>(n + cap);
            const double vt_final = (std::abs(n) <= last.state.normal.freq.cap())
                                        ? last.state.normal.freq.vtilde(n)
                                        : v[i];
            resid = std::max(resid, std::abs(vt_final - in.omega.vtilde(n)));
        }
        last.picard_iterations = it - 1;
        last.picard_residual = resid;
        if (resid <= in.picard.tol) {
            last.v_star = v;
            return last;
        }
        for (Mode n = -cap; n <= cap; ++n) {
            const std::size_t i = static_cast<std::size_t>(n + cap);
            const double vt_final = (std::abs(n) <= last.state.normal.freq.cap())
                                        ? last.state.normal.freq.vtilde(n)
                                        : v[i];
            v[i] -= vt_final - in.omega.vtilde(n);
        }
        trial.potential_override = v;
        last = run_once(trial);
        last.picard_iterations = it;
    }
    throw NoConvergence("frequency inversion did not reach tol " +
                        std::to_string(in.picard.tol) + " in " +
                        std::to_string(in.picard.max_outer) + " Picard iterations");
}

double probe_jacobian(const RunInputs& in, double h) {
    RunInputs base = in;
    base.invert_frequencies = false;
    base.check_diophantine = false;
    RunResult r0 = run_pipeline(base);
    const int cap = in.mode_cap;
    // column j of (dvtilde/dV - I) per probed mode, accumulated into row sums
    std::vector<double> rowsum(static_cast<std::size_t>(2 * cap + 1), 0.0);
    for (Mode j = -cap; j <= cap; ++j) {
        RunInputs bumped = base;
        std::vector<double> v(static_cast<std::size_t>(2 * in.omega.cap() + 1));
        for (Mode n = -in.omega.cap(); n <= in.omega.cap(); ++n)
            v[static_cast<std::size_t>(n + in.omega.cap())] = in.omega.vtilde(n);
        v[static_cast<std::size_t>(j + in.omega.cap())] += h;
        bumped.potential_override = v;
        RunResult rj = run_pipeline(bumped);
        for (Mode m = -cap; m <= cap; ++m) {
            const double col = (rj.state.normal.freq.vtilde(m) -
                                r0.state.normal.freq.vtilde(m)) / h -
                               (m == j ? 1.0 : 0.0);
            rowsum[static_cast<std::size_t>(m + cap)] += std::abs(col);
        }
    }
    double worst = 0;
    for (double s : rowsum) worst = std::max(worst, s);
    return worst;
}

std::string telemetry_csv(const KamState& state) {
    std::ostringstream os;
    os << "step,rho_s,mu_s,delta_s,eps_s_target,norm_R0_plus,norm_R1_plus,norm_R2_plus,"
          "n_terms,n_solved,n_deferred,min_divisor,max_freq_shift,lie_orders_used,tail_norm\n";
    char buf[512];
    for (const auto& r : state.telemetry) {
        std::snprintf(buf, sizeof buf,
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%zu,%.17g,%.17g,%d,"
                      "%.17g\n",
                      r.step, r.rho_s, r.mu_s, r.delta_s, r.eps_s_target, r.norm_R0_plus,
                      r.norm_R1_plus, r.norm_R2_plus, r.n_terms, r.n_solved, r.n_deferred,
                      r.min_divisor, r.max_freq_shift, r.lie_orders_used, r.tail_norm);
        os << buf;
    }
    return os.str();
}

std::string contraction_table(const KamState& state) {
    std::ostringstream os;
    os << "  s        eps_s     ||R0||+      ||R1||+      ||R2||+   shift     check\n";
    char buf[256];
    for (const auto& r : state.telemetry) {
        const double eps1 = r.eps_s_target;
        const bool ok = r.norm_R0_plus <= eps1 && r.norm_R1_plus <= std::pow(eps1, 0.6);
        std::snprintf(buf, sizeof buf, "%3d %12.3e %11.3e %12.3e %12.3e %9.2e  %s\n", r.step,
                      eps1, r.norm_R0_plus, r.norm_R1_plus, r.norm_R2_plus, r.max_freq_shift,
                      ok ? "pass" : "FAIL");
        os << buf;
    }
    return os.str();
}

}  // namespace kamnf
