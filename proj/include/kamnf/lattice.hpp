#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "kamnf/errors.hpp"

namespace kamnf {

using Mode = int;

// |n| = max{1, n, -n}: mode 0 weighs 1, so every exponent contributes at
// least 1 to weighted sums.
inline int weight(Mode n) { return std::max({1, n, -n}); }

inline double weight_pow(Mode n, double theta) {
    return std::pow(static_cast<double>(weight(n)), theta);
}

// Finitely supported map mode -> positive exponent, kept sorted by mode.
// Zero entries are never stored; arithmetic is exact.
class ExponentVector {
  public:
    using Entry = std::pair<Mode, int>;

    ExponentVector() = default;
    ExponentVector(std::initializer_list<Entry> entries) {
        for (const auto& [n, e] : entries) add(n, e);
    }

    int get(Mode n) const {
        auto it = find(n);
        return it == entries_.end() ? 0 : it->second;
    }

    // Adds delta to the exponent of mode n; removes the entry when it hits 0.
    void add(Mode n, int delta) {
        if (delta == 0) return;
        auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const Entry& a, Mode m) { return a.first < m; });
        if (it != entries_.end() && it->first == n) {
            it->second += delta;
            if (it->second == 0) {
                entries_.erase(it);
            } else if (it->second < 0) {
                throw Error("negative exponent at mode " + std::to_string(n));
            }
        } else {
            if (delta < 0) throw Error("negative exponent at mode " + std::to_string(n));
            entries_.insert(it, {n, delta});
        }
    }

    int degree() const {
        int d = 0;
        for (const auto& [n, e] : entries_) d += e;
        return d;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    Mode max_abs_mode() const {
        int m = 0;
        for (const auto& [n, e] : entries_) m = std::max(m, std::abs(n));
        return m;
    }

    friend ExponentVector operator+(const ExponentVector& x, const ExponentVector& y) {
        ExponentVector r = x;
        for (const auto& [n, e] : y.entries_) r.add(n, e);
        return r;
    }

    friend ExponentVector operator-(const ExponentVector& x, const ExponentVector& y) {
        ExponentVector r = x;
        for (const auto& [n, e] : y.entries_) r.add(n, -e);
        return r;
    }

    // Entrywise minimum; the shared live-action part min(k_n, k'_n).
    friend ExponentVector min(const ExponentVector& x, const ExponentVector& y) {
        ExponentVector r;
        for (const auto& [n, e] : x.entries_) {
            int m = std::min(e, y.get(n));
            if (m > 0) r.entries_.push_back({n, m});
        }
        return r;
    }

    bool disjoint_support(const ExponentVector& other) const {
        auto i = entries_.begin();
        auto j = other.entries_.begin();
        while (i != entries_.end() && j != other.entries_.end()) {
            if (i->first == j->first) return false;
            if (i->first < j->first)
                ++i;
            else
                ++j;
        }
        return true;
    }

    auto operator<=>(const ExponentVector&) const = default;
    bool operator==(const ExponentVector&) const = default;

  private:
    std::vector<Entry>::const_iterator find(Mode n) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const Entry& a, Mode m) { return a.first < m; });
        if (it != entries_.end() && it->first == n) return it;
        return entries_.end();
    }

    std::vector<Entry> entries_;
};

// One monomial I(0)^a q^k qbar^kp J_{m1} J_{m2}: the a-exponents are frozen
// initial actions carried symbolically, jfactors hold 0, 1 or 2 attached
// J_m = I_m - I_m(0) factors (the class of the monomial).
struct Monomial {
    ExponentVector a, k, kp;
    std::vector<Mode> jfactors;  // sorted, size <= 2

    int cls() const { return static_cast<int>(jfactors.size()); }

    // Degree counts frozen actions twice and each J factor twice.
    int degree() const { return 2 * a.degree() + k.degree() + kp.degree() + 2 * cls(); }

    Mode max_abs_mode() const {
        int m = std::max({a.max_abs_mode(), k.max_abs_mode(), kp.max_abs_mode()});
        for (Mode j : jfactors) m = std::max(m, std::abs(j));
        return m;
    }

    void sort_jfactors() { std::sort(jfactors.begin(), jfactors.end()); }

    // True when the class-0/1 disjointness constraint supp k ∩ supp kp = ∅
    // holds; class-2 monomials carry no assumption.
    bool class_constraint_ok() const {
        if (cls() >= 2) return true;
        return k.disjoint_support(kp);
    }

    // Swap k <-> kp: the monomial of the complex-conjugate term.
    Monomial conjugate() const {
        Monomial m{a, kp, k, jfactors};
        return m;
    }

    bool is_constant() const { return k.empty() && kp.empty() && jfactors.empty(); }

    std::string id() const;

    auto operator<=>(const Monomial&) const = default;
    bool operator==(const Monomial&) const = default;
};

// Non-increasing weights of the supported modes, each repeated
// 2a_n + k_n + kp_n times; J-factor modes are excluded (the plus-norm
// accounts for them separately).
struct RearrangementView {
    std::vector<int> nstars;
    int n1_star = 0;  // 0 when the support is empty

    double sum_pow(double theta, std::size_t from_index = 0) const {
        double s = 0;
        for (std::size_t i = from_index; i < nstars.size(); ++i)
            s += std::pow(static_cast<double>(nstars[i]), theta);
        return s;
    }
};

// momentum m(k, k') = sum (k_n - k'_n) n with the raw signed mode value.
long long momentum(const ExponentVector& k, const ExponentVector& kp);

inline long long momentum(const Monomial& m) { return momentum(m.k, m.kp); }

inline long long momentum_star(const ExponentVector& k, const ExponentVector& kp) {
    return std::llabs(momentum(k, kp));
}

inline long long momentum_star(const Monomial& m) { return momentum_star(m.k, m.kp); }

RearrangementView rearrangement(const Monomial& m);

// Both sides of the weighted rearrangement inequality
//   sum (2a+k+kp) |n|^θ - 2 (n1*)^θ + m*^θ  >=  (2-2^θ) sum_{i>=3} (ni*)^θ.
// Throws DegenerateMonomial when the rearrangement has fewer than 2 entries.
struct LemmaH1Sides {
    double lhs;
    double rhs;
};
LemmaH1Sides lemma_h1_sides(const Monomial& m, double theta);

}  // namespace kamnf
