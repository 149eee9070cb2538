#include "kamnf/lattice.hpp"

#include <sstream>

namespace kamnf {

long long momentum(const ExponentVector& k, const ExponentVector& kp) {
    long long m = 0;
    for (const auto& [n, e] : k.entries()) m += static_cast<long long>(e) * n;
    for (const auto& [n, e] : kp.entries()) m -= static_cast<long long>(e) * n;
    return m;
}

RearrangementView rearrangement(const Monomial& m) {
    RearrangementView view;
    auto push = [&view](Mode n, int times) {
        for (int i = 0; i < times; ++i) view.nstars.push_back(weight(n));
    };
    // Collect 2a_n + k_n + kp_n copies per supported mode.
    for (const auto& [n, e] : m.a.entries()) push(n, 2 * e);
    for (const auto& [n, e] : m.k.entries()) push(n, e);
    for (const auto& [n, e] : m.kp.entries()) push(n, e);
    std::sort(view.nstars.begin(), view.nstars.end(), std::greater<int>());
    view.n1_star = view.nstars.empty() ? 0 : view.nstars.front();
    return view;
}

LemmaH1Sides lemma_h1_sides(const Monomial& m, double theta) {
    RearrangementView view = rearrangement(m);
    if (view.nstars.size() < 2)
        throw DegenerateMonomial("lemma_h1_sides needs total degree >= 2, got " +
                                 std::to_string(view.nstars.size()) + " entries");
    const double mstar = static_cast<double>(momentum_star(m));
    double lhs = view.sum_pow(theta) - 2.0 * std::pow(static_cast<double>(view.n1_star), theta);
    if (mstar > 0) lhs += std::pow(mstar, theta);
    const double rhs = (2.0 - std::pow(2.0, theta)) * view.sum_pow(theta, 2);
    return {lhs, rhs};
}

std::string Monomial::id() const {
    std::ostringstream os;
    auto emit = [&os](const char* tag, const ExponentVector& v) {
        os << tag << ':';
        bool first = true;
        for (const auto& [n, e] : v.entries()) {
            if (!first) os << ',';
            os << n << '^' << e;
            first = false;
        }
    };
    emit("a", a);
    emit("|k", k);
    emit("|kp", kp);
    os << "|j:";
    for (std::size_t i = 0; i < jfactors.size(); ++i) {
        if (i) os << ',';
        os << jfactors[i];
    }
    return os.str();
}

}  // namespace kamnf
