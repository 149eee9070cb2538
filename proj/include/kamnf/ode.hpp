#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kamnf/errors.hpp"

namespace kamnf {

using OdeRhs =
    std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    std::uint64_t max_steps = 200000000ull;
};

struct OdeStats {
    std::uint64_t steps = 0;
    std::uint64_t rejected = 0;
};

// Dormand-Prince 5(4) with PI step control. The observer, when set, is
// called at t0, every multiple of observe_dt (integration lands exactly on
// those times), and t1. Throws IntegratorFailure on step-size collapse.
void rk45_integrate(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
                    const OdeOptions& opt, OdeStats* stats = nullptr,
                    const std::function<void(double, const std::vector<double>&)>& observer = {},
                    double observe_dt = 0);

// Fixed-step implicit midpoint (symplectic), fixed-point iterated to
// `fp_tol`; the long-horizon alternative.
void implicit_midpoint_integrate(const OdeRhs& rhs, double t0, double t1, double h,
                                 std::vector<double>& y, double fp_tol = 1e-13,
                                 int fp_max_iter = 50,
                                 const std::function<void(double, const std::vector<double>&)>&
                                     observer = {},
                                 double observe_dt = 0);

}  // namespace kamnf
