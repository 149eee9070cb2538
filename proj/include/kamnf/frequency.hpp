#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "kamnf/errors.hpp"
#include "kamnf/lattice.hpp"

namespace kamnf {

// Corrected normal frequencies: vtilde_n for |n| <= cap together with the
// Diophantine constant gamma. The quadratic frequency of mode n is
// n^2 + vtilde_n.
class FrequencyVector {
  public:
    FrequencyVector() = default;
    FrequencyVector(int cap, double gamma) : cap_(cap), gamma_(gamma), v_(2 * cap + 1, 0.0) {}

    int cap() const { return cap_; }
    double gamma() const { return gamma_; }
    void set_gamma(double g) { gamma_ = g; }

    double vtilde(Mode n) const { return v_[index(n)]; }

    void set_vtilde(Mode n, double value) {
        if (std::abs(value) > 2.0)
            throw Error("|vtilde| <= 2 violated at mode " + std::to_string(n) + ": " +
                        std::to_string(value));
        v_[index(n)] = value;
    }

    void shift_vtilde(Mode n, double delta) { set_vtilde(n, vtilde(n) + delta); }

    double omega(Mode n) const { return static_cast<double>(n) * n + vtilde(n); }

    double max_abs_vtilde() const {
        double m = 0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    bool operator==(const FrequencyVector&) const = default;

  private:
    std::size_t index(Mode n) const {
        if (std::abs(n) > cap_)
            throw ModeOutOfRange("mode " + std::to_string(n) + " beyond frequency cap " +
                                 std::to_string(cap_));
        return static_cast<std::size_t>(n + cap_);
    }

    int cap_ = 0;
    double gamma_ = 0;
    std::vector<double> v_;
};

// Decay parameters and frozen torus actions I_n(0). The default profile is
// the target-torus choice I_n(0) = (3/4) e^{-2 r |n|^θ}.
struct TorusSpec {
    double r = 1.0;
    double theta = 0.5;
    int cap = 0;
    std::vector<double> actions;  // indexed n + cap

    static TorusSpec standard(double r, double theta, int cap) {
        TorusSpec t;
        t.r = r;
        t.theta = theta;
        t.cap = cap;
        t.actions.resize(2 * cap + 1);
        for (Mode n = -cap; n <= cap; ++n)
            t.actions[static_cast<std::size_t>(n + cap)] =
                0.75 * std::exp(-2.0 * r * weight_pow(n, theta));
        return t;
    }

    double action(Mode n) const {
        if (std::abs(n) > cap)
            throw ModeOutOfRange("mode " + std::to_string(n) + " beyond torus cap " +
                                 std::to_string(cap));
        return actions[static_cast<std::size_t>(n + cap)];
    }
};

// Quadratic normal part N = sum (n^2 + vtilde_n) |q_n|^2.
struct NormalForm {
    FrequencyVector freq;
};

}  // namespace kamnf
