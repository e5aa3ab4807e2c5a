#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ybfact/errors.hpp"
#include "ybfact/linalg.hpp"

namespace ybfact {

// Metric and helpers per carrier set U. Residuals are always a single
// scalar: absolute value for scalars, Frobenius norm for matrices.
template <class T>
struct Carrier;

template <>
struct Carrier<Complex> {
    static constexpr const char* tag = "scalar-complex";
    static double norm(const Complex& x) { return std::abs(x); }
    static double distance(const Complex& a, const Complex& b) { return std::abs(a - b); }
    static Complex perturb(const Complex& x, double eps) { return x + eps; }
};

template <>
struct Carrier<ComplexMatrix> {
    static constexpr const char* tag = "square-matrix";
    static double norm(const ComplexMatrix& x) { return x.norm(); }
    static double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
        return (a - b).norm();
    }
    static ComplexMatrix perturb(const ComplexMatrix& x, double eps) {
        return x + eps * ComplexMatrix::Identity(x.rows(), x.cols());
    }
};

// A twisted transposition mu(u,v) = (phi(u,v), psi(u,v)) on U x U.
//
// `margin` is a scale-free proxy for the distance to the bad set of the
// rational map (pole locus, spectral collisions). The hard domain guard is
// margin > guard_min; campaign samplers demand a larger margin so that
// residual statistics stay meaningful near machine precision.
template <class T>
struct TwistedMap {
    std::string name;
    std::string carrier_tag = Carrier<T>::tag;
    double guard_min = 1e-9;
    std::function<std::pair<T, T>(const T&, const T&)> apply_fn;
    std::function<double(const T&, const T&)> margin;

    bool guard(const T& u, const T& v) const { return margin(u, v) > guard_min; }
};

template <class T>
std::pair<T, T> apply_mu(const TwistedMap<T>& map, const T& u, const T& v) {
    if (!map.guard(u, v))
        throw Error(ErrorKind::OutsideDomain, "point outside the domain of " + map.name);
    return map.apply_fn(u, v);
}

template <class T>
T phi_of(const TwistedMap<T>& map, const T& u, const T& v) {
    return apply_mu(map, u, v).first;
}

template <class T>
T psi_of(const TwistedMap<T>& map, const T& u, const T& v) {
    return apply_mu(map, u, v).second;
}

// Adjacent-transposition word in S_N; letters are 1-based, letter i acts on
// slots (i, i+1).
struct BraidWord {
    int n_strands = 0;
    std::vector<int> letters;
};

template <class T>
std::vector<T> act_braid(const TwistedMap<T>& map, const BraidWord& word, std::vector<T> tuple) {
    if (static_cast<int>(tuple.size()) != word.n_strands)
        throw Error(ErrorKind::InvalidArgument, "tuple size does not match strand count");
    for (std::size_t k = 0; k < word.letters.size(); ++k) {
        const int i = word.letters[k];
        if (i < 1 || i >= word.n_strands)
            throw Error(ErrorKind::InvalidArgument,
                        "braid letter " + std::to_string(i) + " out of range");
        try {
            auto out = apply_mu(map, tuple[i - 1], tuple[i]);
            tuple[i - 1] = std::move(out.first);
            tuple[i] = std::move(out.second);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::OutsideDomain)
                throw Error(ErrorKind::OutsideDomain,
                            "guard failed at word position " + std::to_string(k + 1));
            throw;
        }
    }
    return tuple;
}

// The two S_N-invariant functions: phi(u_1, phi(u_2, ... phi(u_N, w)...))
// and psi(... psi(psi(w, u_1), u_2) ..., u_N).
template <class T>
std::pair<T, T> nested_invariants(const TwistedMap<T>& map, const std::vector<T>& us, const T& w) {
    if (us.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one u");
    T acc_phi = w;
    for (auto it = us.rbegin(); it != us.rend(); ++it) acc_phi = phi_of(map, *it, acc_phi);
    T acc_psi = w;
    for (const auto& u : us) acc_psi = psi_of(map, acc_psi, u);
    return {acc_phi, acc_psi};
}

// Example: mu(u,v) = (q(v), q^{-1}(u)) for an invertible automorphism q.
template <class T>
TwistedMap<T> make_qtwist(std::function<T(const T&)> q, std::function<T(const T&)> q_inv,
                          std::string name = "qtwist") {
    TwistedMap<T> map;
    map.name = std::move(name);
    map.carrier_tag = "automorphism-pair";
    map.apply_fn = [q = std::move(q), q_inv = std::move(q_inv)](const T& u, const T& v) {
        return std::make_pair(q(v), q_inv(u));
    };
    map.margin = [](const T&, const T&) { return 1e9; };
    return map;
}

// Example: U = C, mu(u,v) = (1-u+uv, uv/(1-u+uv)).
inline TwistedMap<Complex> make_scalar_rational() {
    TwistedMap<Complex> map;
    map.name = "scalar-rational";
    map.apply_fn = [](const Complex& u, const Complex& v) {
        const Complex den = 1.0 - u + u * v;
        return std::make_pair(den, u * v / den);
    };
    map.margin = [](const Complex& u, const Complex& v) {
        return std::abs(1.0 - u + u * v) / (1.0 + std::abs(u) + std::abs(u) * std::abs(v));
    };
    return map;
}

// Example: U = Mat_m, mu(u,v) = (1-u+uv, (1-u+uv)^{-1} uv).
inline TwistedMap<ComplexMatrix> make_algebra_map(int m) {
    TwistedMap<ComplexMatrix> map;
    map.name = "algebra(m=" + std::to_string(m) + ")";
    map.apply_fn = [m](const ComplexMatrix& u, const ComplexMatrix& v) {
        const ComplexMatrix den = ComplexMatrix::Identity(m, m) - u + u * v;
        return std::make_pair(den, ComplexMatrix(den.fullPivLu().solve(u * v)));
    };
    map.margin = [m](const ComplexMatrix& u, const ComplexMatrix& v) {
        const ComplexMatrix den = ComplexMatrix::Identity(m, m) - u + u * v;
        Eigen::JacobiSVD<ComplexMatrix> svd(den);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        return smin / (1.0 + u.norm() + u.norm() * v.norm());
    };
    return map;
}

// Wraps a map so that psi gains an additive defect; used to prove the
// checkers are not vacuous.
template <class T>
TwistedMap<T> perturb_psi(TwistedMap<T> map, double eps) {
    auto inner = map.apply_fn;
    map.name += "+psi_defect";
    map.apply_fn = [inner, eps](const T& u, const T& v) {
        auto out = inner(u, v);
        out.second = Carrier<T>::perturb(out.second, eps);
        return out;
    };
    return map;
}

struct RelationReport {
    std::string map_name;
    std::size_t n_triples = 0;
    std::size_t rejected = 0;
    std::map<std::string, double> max_residuals;
    bool pass = false;
    std::uint64_t seed = 0;
    double tolerance = 0.0;

    double worst() const {
        double w = 0.0;
        for (const auto& [k, v] : max_residuals) w = std::max(w, v);
        return w;
    }
};

namespace detail {

template <class T>
double tuple_distance(const std::vector<T>& a, const std::vector<T>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, Carrier<T>::distance(a[i], b[i]));
    return d;
}

template <class T>
double triple_scale(const std::array<T, 3>& t) {
    return 1.0 + std::max({Carrier<T>::norm(t[0]), Carrier<T>::norm(t[1]), Carrier<T>::norm(t[2])});
}

inline void finish_report(RelationReport& rep, double tol) {
    rep.tolerance = tol;
    rep.pass = rep.n_triples > 0 && rep.worst() <= tol;
}

}  // namespace detail

// Residuals of relations (1): sigma_1^2 = sigma_2^2 = id and the braid
// identity, per triple, in the carrier metric, relative to input scale.
template <class T>
RelationReport check_relations(const TwistedMap<T>& map,
                               const std::vector<std::array<T, 3>>& triples, double tol) {
    RelationReport rep;
    rep.map_name = map.name;
    auto& r = rep.max_residuals;
    r["sigma1_sq"] = r["sigma2_sq"] = r["braid"] = 0.0;
    const BraidWord w11{3, {1, 1}}, w22{3, {2, 2}}, w121{3, {1, 2, 1}}, w212{3, {2, 1, 2}};
    for (const auto& t : triples) {
        const std::vector<T> x{t[0], t[1], t[2]};
        try {
            const double scale = detail::triple_scale(t);
            const double r1 = detail::tuple_distance(act_braid(map, w11, x), x) / scale;
            const double r2 = detail::tuple_distance(act_braid(map, w22, x), x) / scale;
            const double rb =
                detail::tuple_distance(act_braid(map, w121, x), act_braid(map, w212, x)) / scale;
            r["sigma1_sq"] = std::max(r["sigma1_sq"], r1);
            r["sigma2_sq"] = std::max(r["sigma2_sq"], r2);
            r["braid"] = std::max(r["braid"], rb);
            ++rep.n_triples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OutsideDomain) throw;
            ++rep.rejected;
        }
    }
    detail::finish_report(rep, tol);
    return rep;
}

// Residuals of the functional equations (2): the two involution identities
// and the three composition identities, reported separately.
template <class T>
RelationReport check_functional_equations(const TwistedMap<T>& map,
                                          const std::vector<std::array<T, 3>>& triples,
                                          double tol) {
    RelationReport rep;
    rep.map_name = map.name;
    auto& r = rep.max_residuals;
    r["phi_involution"] = r["psi_involution"] = 0.0;
    r["phi_composition"] = r["mixed_composition"] = r["psi_composition"] = 0.0;
    for (const auto& t : triples) {
        const T &u = t[0], &v = t[1], &w = t[2];
        try {
            const double scale = detail::triple_scale(t);
            const auto [p, q] = apply_mu(map, u, v);        // phi(u,v), psi(u,v)
            const auto [vw_p, vw_q] = apply_mu(map, v, w);  // phi(v,w), psi(v,w)
            const auto [pp, qq] = apply_mu(map, p, q);
            const double ri1 = Carrier<T>::distance(pp, u) / scale;
            const double ri2 = Carrier<T>::distance(qq, v) / scale;

            const T lhs_phi = phi_of(map, u, vw_p);
            const T inner = phi_of(map, q, w);
            const T rhs_phi = phi_of(map, p, inner);
            const double rc1 = Carrier<T>::distance(lhs_phi, rhs_phi) / scale;

            const T lhs_mix = phi_of(map, psi_of(map, u, vw_p), vw_q);
            const T rhs_mix = psi_of(map, p, inner);
            const double rc2 = Carrier<T>::distance(lhs_mix, rhs_mix) / scale;

            const T lhs_psi = psi_of(map, q, w);
            const T rhs_psi = psi_of(map, psi_of(map, u, vw_p), vw_q);
            const double rc3 = Carrier<T>::distance(lhs_psi, rhs_psi) / scale;

            r["phi_involution"] = std::max(r["phi_involution"], ri1);
            r["psi_involution"] = std::max(r["psi_involution"], ri2);
            r["phi_composition"] = std::max(r["phi_composition"], rc1);
            r["mixed_composition"] = std::max(r["mixed_composition"], rc2);
            r["psi_composition"] = std::max(r["psi_composition"], rc3);
            ++rep.n_triples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OutsideDomain) throw;
            ++rep.rejected;
        }
    }
    detail::finish_report(rep, tol);
    return rep;
}

// Minimum guard margin over every application either checker performs on a
// triple; negative when some path leaves the domain entirely. Samplers
// reject triples whose margin is below the campaign threshold.
template <class T>
double triple_margin(const TwistedMap<T>& map, const T& u, const T& v, const T& w) {
    double m = 1e9;
    auto probe = [&](const T& a, const T& b) -> std::pair<T, T> {
        m = std::min(m, map.margin(a, b));
        if (m <= map.guard_min) throw Error(ErrorKind::OutsideDomain, "margin probe");
        return map.apply_fn(a, b);
    };
    try {
        {
            auto [p, q] = probe(u, v);
            probe(p, q);  // sigma1^2
            auto [q2, w2] = probe(q, w);
            probe(p, q2);  // braid left path
            (void)w2;
        }
        {
            auto [p, q] = probe(v, w);
            probe(p, q);  // sigma2^2
            auto [u2, p2] = probe(u, p);
            probe(p2, q);  // braid right path
            (void)u2;
        }
        return m;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::OutsideDomain) return -1.0;
        throw;
    }
}

// sigma.mu, the induced set-theoretical solution; residual of the
// Yang-Baxter identity R12 R13 R23 = R23 R13 R12 on one triple.
template <class T>
double yang_baxter_residual(const TwistedMap<T>& map, const std::array<T, 3>& t) {
    auto R = [&](std::array<T, 3> x, int i, int j) {
        auto out = apply_mu(map, x[i], x[j]);
        x[i] = out.second;  // sigma swaps the two outputs of mu
        x[j] = out.first;
        return x;
    };
    const std::array<T, 3> lhs = R(R(R(t, 1, 2), 0, 2), 0, 1);
    const std::array<T, 3> rhs = R(R(R(t, 0, 1), 0, 2), 1, 2);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d = std::max(d, Carrier<T>::distance(lhs[i], rhs[i]));
    return d / detail::triple_scale(t);
}

}  // namespace ybfact
