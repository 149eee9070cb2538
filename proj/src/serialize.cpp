#include "kamnf/serialize.hpp"

#include <cstdio>
#include <cstdlib>

#include <json.hpp>

namespace kamnf {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string double_to_hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double hex_to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ConfigError("bad float literal: " + s);
    return v;
}

namespace {

double json_to_double(const json& j) {
    if (j.is_string()) return hex_to_double(j.get<std::string>());
    return j.get<double>();
}

json exponents_to_json(const ExponentVector& v) {
    json arr = json::array();
    for (const auto& [n, e] : v.entries()) arr.push_back(json::array({n, e}));
    return arr;
}

ExponentVector exponents_from_json(const json& arr) {
    ExponentVector v;
    for (const auto& pair : arr) v.add(pair.at(0).get<int>(), pair.at(1).get<int>());
    return v;
}

ordered_json hamiltonian_to_json_obj(const Hamiltonian& h) {
    ordered_json out;
    out["mode_cap"] = h.mode_cap();
    out["degree_cap"] = h.degree_cap();
    ordered_json terms = ordered_json::array();
    for (const auto& [m, c] : h.terms()) {
        ordered_json rec;
        rec["coeff_re"] = double_to_hex(static_cast<double>(c.real()));
        rec["coeff_im"] = double_to_hex(static_cast<double>(c.imag()));
        rec["a"] = exponents_to_json(m.a);
        rec["k"] = exponents_to_json(m.k);
        rec["kp"] = exponents_to_json(m.kp);
        rec["j"] = m.jfactors;
        terms.push_back(std::move(rec));
    }
    out["terms"] = std::move(terms);
    return out;
}

Hamiltonian hamiltonian_from_json_obj(const json& obj) {
    Hamiltonian h(obj.at("mode_cap").get<int>(), obj.at("degree_cap").get<int>());
    for (const auto& rec : obj.at("terms")) {
        Monomial m;
        m.a = exponents_from_json(rec.at("a"));
        m.k = exponents_from_json(rec.at("k"));
        m.kp = exponents_from_json(rec.at("kp"));
        for (const auto& j : rec.at("j")) m.jfactors.push_back(j.get<int>());
        const cplx c{static_cast<real_t>(json_to_double(rec.at("coeff_re"))),
                     static_cast<real_t>(json_to_double(rec.at("coeff_im")))};
        h.add(std::move(m), c);
    }
    return h;
}

}  // namespace

std::string hamiltonian_to_json(const Hamiltonian& h) {
    return hamiltonian_to_json_obj(h).dump(1);
}

Hamiltonian hamiltonian_from_json(const std::string& text) {
    return hamiltonian_from_json_obj(json::parse(text));
}

std::string profile_to_json(const GevreyProfile& f) {
    ordered_json out;
    out["theta"] = f.theta;
    out["mu_f"] = f.mu_f;
    out["C"] = f.C;
    ordered_json coeffs = ordered_json::array();
    for (Mode n = -f.cap; n <= f.cap; ++n) {
        const cplx c = f.fhat(n);
        coeffs.push_back(ordered_json::array(
            {n, double_to_hex(static_cast<double>(c.real())),
             double_to_hex(static_cast<double>(c.imag()))}));
    }
    out["coeffs"] = std::move(coeffs);
    return out.dump(1);
}

GevreyProfile profile_from_json(const std::string& text) {
    const json obj = json::parse(text);
    GevreyProfile f;
    f.theta = obj.at("theta").get<double>();
    f.mu_f = obj.at("mu_f").get<double>();
    f.C = obj.at("C").get<double>();
    int cap = 0;
    for (const auto& rec : obj.at("coeffs")) cap = std::max(cap, std::abs(rec.at(0).get<int>()));
    f.cap = cap;
    f.coeffs.assign(static_cast<std::size_t>(2 * cap + 1), cplx{0, 0});
    for (const auto& rec : obj.at("coeffs"))
        f.set(rec.at(0).get<int>(), cplx{static_cast<real_t>(json_to_double(rec.at(1))),
                                         static_cast<real_t>(json_to_double(rec.at(2)))});
    if (f.bound_ratio() > 1.0 + 1e-12)
        throw ConfigError("profile violates its own decay bound |fhat| <= C e^{-mu_f |n|^t}");
    return f;
}

std::string final_state_to_json(const RunResult& result) {
    const KamState& st = result.state;
    ordered_json out;
    out["steps_executed"] = st.s - 1;
    ordered_json freq = ordered_json::array();
    for (Mode n = -st.normal.freq.cap(); n <= st.normal.freq.cap(); ++n)
        freq.push_back(
            ordered_json::array({n, double_to_hex(st.normal.freq.vtilde(n))}));
    out["vtilde"] = std::move(freq);
    ordered_json vstar = ordered_json::array();
    for (Mode n = -result.omega.cap(); n <= result.omega.cap(); ++n)
        vstar.push_back(ordered_json::array(
            {n, double_to_hex(result.v_star[static_cast<std::size_t>(n + result.omega.cap())])}));
    out["v_star"] = std::move(vstar);
    ordered_json omega = ordered_json::array();
    for (Mode n = -result.omega.cap(); n <= result.omega.cap(); ++n)
        omega.push_back(ordered_json::array({n, double_to_hex(result.omega.vtilde(n))}));
    out["omega"] = std::move(omega);
    out["r_final"] = hamiltonian_to_json_obj(st.r);
    ordered_json gens = ordered_json::array();
    for (const auto& g : st.generators) gens.push_back(hamiltonian_to_json_obj(g));
    out["generators"] = std::move(gens);
    out["dropped_constant_mass"] = double_to_hex(st.dropped_constant_mass);
    out["cumulative_tail"] =
        ordered_json::array({double_to_hex(st.cumulative_tail[0]),
                             double_to_hex(st.cumulative_tail[1]),
                             double_to_hex(st.cumulative_tail[2])});
    out["picard_iterations"] = result.picard_iterations;
    out["picard_residual"] = double_to_hex(result.picard_residual);
    out["final_r2_plus"] = double_to_hex(result.final_r2_plus);
    return out.dump(1);
}

std::string seed_to_json(const Seed& seed, const GevreyProfile& f) {
    ordered_json out;
    ordered_json freq = ordered_json::array();
    for (Mode n = -seed.normal.freq.cap(); n <= seed.normal.freq.cap(); ++n)
        freq.push_back(ordered_json::array({n, double_to_hex(seed.normal.freq.vtilde(n))}));
    out["normal_vtilde"] = std::move(freq);
    out["r"] = hamiltonian_to_json_obj(seed.r);
    out["profile"] = json::parse(profile_to_json(f));
    return out.dump(1);
}

}  // namespace kamnf
