#include "kamnf/ode.hpp"

#include <algorithm>
#include <cmath>

namespace kamnf {

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

struct Dopri {
    const OdeRhs& rhs;
    const OdeOptions& opt;
    OdeStats& stats;
    double h;
    double err_prev = 1.0;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, y5;

    Dopri(const OdeRhs& r, const OdeOptions& o, OdeStats& s, std::size_t n)
        : rhs(r), opt(o), stats(s), h(o.h_init) {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &y5}) v->resize(n);
    }

    void segment(double t, double t1, std::vector<double>& y) {
        const std::size_t n = y.size();
        rhs(t, y, k1);
        while (t < t1 - 1e-13 * (1 + std::abs(t1))) {
            double hs = std::min(h, t1 - t);
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
            rhs(t + c2 * hs, ytmp, k2);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
            rhs(t + c3 * hs, ytmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            rhs(t + c4 * hs, ytmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs(t + c5 * hs, ytmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                       a65 * k5[i]);
            rhs(t + hs, ytmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                y5[i] =
                    y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            rhs(t + hs, y5, k7);

            double err = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double y4 = y[i] + hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                               e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc =
                    opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
                const double d = (y5[i] - y4) / sc;
                err += d * d;
            }
            err = std::sqrt(err / static_cast<double>(n));

            if (err <= 1.0 || hs <= opt.h_min * (1 + std::abs(t))) {
                t += hs;
                y.swap(y5);
                k1.swap(k7);  // first-same-as-last
                if (++stats.steps > opt.max_steps)
                    throw IntegratorFailure("step budget exhausted at t = " + std::to_string(t));
                const double f = 0.9 * std::pow(std::max(err, 1e-10), -0.14) *
                                 std::pow(std::max(err_prev, 1e-10), 0.08);
                h = hs * std::clamp(f, 0.2, 5.0);
                err_prev = std::max(err, 1e-10);
            } else {
                ++stats.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < opt.h_min * (1 + std::abs(t)))
                    throw IntegratorFailure("step size collapsed at t = " + std::to_string(t));
            }
        }
    }
};

}  // namespace

void rk45_integrate(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
                    const OdeOptions& opt, OdeStats* stats,
                    const std::function<void(double, const std::vector<double>&)>& observer,
                    double observe_dt) {
    OdeStats local;
    Dopri stepper(rhs, opt, local, y.size());
    if (!observer || observe_dt <= 0) {
        if (observer) observer(t0, y);
        stepper.segment(t0, t1, y);
        if (observer) observer(t1, y);
    } else {
        observer(t0, y);
        double t = t0;
        while (t < t1 - 1e-12) {
            const double tn = std::min(t + observe_dt, t1);
            stepper.segment(t, tn, y);
            observer(tn, y);
            t = tn;
        }
    }
    if (stats) *stats = local;
}

void implicit_midpoint_integrate(const OdeRhs& rhs, double t0, double t1, double h,
                                 std::vector<double>& y, double fp_tol, int fp_max_iter,
                                 const std::function<void(double, const std::vector<double>&)>&
                                     observer,
                                 double observe_dt) {
    const std::size_t n = y.size();
    std::vector<double> ymid(n), f(n), ynew(n);
    double t = t0;
    double next_obs = t0 + (observe_dt > 0 ? observe_dt : (t1 - t0));
    if (observer) observer(t0, y);
    while (t < t1 - 1e-15) {
        const double step = std::min(h, t1 - t);
        ynew = y;
        for (int it = 0;; ++it) {
            for (std::size_t i = 0; i < n; ++i) ymid[i] = 0.5 * (y[i] + ynew[i]);
            rhs(t + 0.5 * step, ymid, f);
            double delta = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = y[i] + step * f[i];
                delta = std::max(delta, std::abs(v - ynew[i]));
                ynew[i] = v;
            }
            if (delta < fp_tol) break;
            if (it >= fp_max_iter)
                throw IntegratorFailure("implicit midpoint fixed point stalled at t = " +
                                        std::to_string(t));
        }
        y = ynew;
        t += step;
        if (observer && t >= next_obs - 1e-12) {
            observer(t, y);
            next_obs += observe_dt;
        }
    }
    if (observer && observe_dt <= 0) observer(t1, y);
}

}  // namespace kamnf
