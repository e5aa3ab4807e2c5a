#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ybfact/linalg.hpp"
#include "ybfact/twisted_map.hpp"

namespace ybfact {

// Parameter-dependent linear operator R(u,v) on V tensor V, read as a map
// V(u) x V(v) -> V(phi(u,v)) x V(psi(u,v)). Tensor basis is lexicographic:
// e_i tensor e_j sits at index i*n + j (0-based).
template <class T>
struct TwistedRMatrix {
    int dim = 0;  // fiber dimension n; operators are n^2 x n^2
    std::string name;
    std::function<ComplexMatrix(const T&, const T&)> evaluate;
};

template <class T>
TwistedRMatrix<T> make_trivial_keep(int n) {
    TwistedRMatrix<T> R;
    R.dim = n;
    R.name = "trivial-keep";
    R.evaluate = [n](const T&, const T&) { return ComplexMatrix::Identity(n * n, n * n); };
    return R;
}

template <class T>
TwistedRMatrix<T> make_trivial_flip(int n) {
    ComplexMatrix P = ComplexMatrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(j * n + i, i * n + j) = 1.0;
    TwistedRMatrix<T> R;
    R.dim = n;
    R.name = "trivial-flip";
    R.evaluate = [P](const T&, const T&) { return P; };
    return R;
}

// Multiplies every operator by a constant; breaks the inverse property for
// s != +-1 (used to prove the checkers reject).
template <class T>
TwistedRMatrix<T> scale_rmatrix(TwistedRMatrix<T> R, Complex s) {
    auto inner = R.evaluate;
    R.name += "*scaled";
    R.evaluate = [inner, s](const T& u, const T& v) { return ComplexMatrix(s * inner(u, v)); };
    return R;
}

namespace detail {

// Deterministic evaluation assert: pure maps must reproduce node values
// bit for bit, so any relation residual is attributable to R.
template <class T>
void assert_recomputed(const TwistedMap<T>& map, const T& u, const T& v,
                       const std::pair<T, T>& first) {
    const auto again = map.apply_fn(u, v);
    if (Carrier<T>::distance(again.first, first.first) != 0.0 ||
        Carrier<T>::distance(again.second, first.second) != 0.0)
        throw Error(ErrorKind::InvalidArgument,
                    "map evaluation is not deterministic; residuals would be ambiguous");
}

}  // namespace detail

// Residual of R(phi(u,v), psi(u,v)) R(u,v) = 1 over the sampled pairs.
template <class T>
RelationReport check_inverse(const TwistedRMatrix<T>& R, const TwistedMap<T>& map,
                             const std::vector<std::array<T, 2>>& pairs, double tol) {
    RelationReport rep;
    rep.map_name = R.name + "|" + map.name;
    rep.max_residuals["inverse"] = 0.0;
    const ComplexMatrix I = ComplexMatrix::Identity(R.dim * R.dim, R.dim * R.dim);
    for (const auto& pr : pairs) {
        try {
            const auto uv = apply_mu(map, pr[0], pr[1]);
            detail::assert_recomputed(map, pr[0], pr[1], uv);
            const ComplexMatrix A = R.evaluate(uv.first, uv.second);
            const ComplexMatrix B = R.evaluate(pr[0], pr[1]);
            const double scale = 1.0 + std::max(A.norm(), B.norm());
            rep.max_residuals["inverse"] =
                std::max(rep.max_residuals["inverse"], (A * B - I).norm() / scale);
            ++rep.n_triples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OutsideDomain) throw;
            ++rep.rejected;
        }
    }
    detail::finish_report(rep, tol);
    return rep;
}

// Residual of the twisted Yang-Baxter relation
//   R12(phi(u,v), phi(psi(u,v), w)) R23(psi(u,v), w) R12(u,v)
//     = R23(psi(u, phi(v,w)), psi(v,w)) R12(u, phi(v,w)) R23(v,w)
// as n^3 x n^3 operators, with R12 = R tensor 1 and R23 = 1 tensor R.
template <class T>
RelationReport check_twisted_ybr(const TwistedRMatrix<T>& R, const TwistedMap<T>& map,
                                 const std::vector<std::array<T, 3>>& triples, double tol) {
    RelationReport rep;
    rep.map_name = R.name + "|" + map.name;
    rep.max_residuals["twisted_ybr"] = 0.0;
    const int n = R.dim;
    const ComplexMatrix In = ComplexMatrix::Identity(n, n);
    auto r12 = [&](const ComplexMatrix& Rm) { return kron(Rm, In); };
    auto r23 = [&](const ComplexMatrix& Rm) { return kron(In, Rm); };
    for (const auto& t : triples) {
        const T &u = t[0], &v = t[1], &w = t[2];
        try {
            // left path nodes
            const auto uv = apply_mu(map, u, v);
            detail::assert_recomputed(map, u, v, uv);
            const auto qw = apply_mu(map, uv.second, w);
            detail::assert_recomputed(map, uv.second, w, qw);
            // right path nodes
            const auto vw = apply_mu(map, v, w);
            detail::assert_recomputed(map, v, w, vw);
            const auto ur = apply_mu(map, u, vw.first);
            detail::assert_recomputed(map, u, vw.first, ur);

            const ComplexMatrix lhs = r12(R.evaluate(uv.first, qw.first)) *
                                      r23(R.evaluate(uv.second, w)) * r12(R.evaluate(u, v));
            const ComplexMatrix rhs = r23(R.evaluate(ur.second, vw.second)) *
                                      r12(R.evaluate(u, vw.first)) * r23(R.evaluate(v, w));
            const double scale = 1.0 + std::max(lhs.norm(), rhs.norm());
            rep.max_residuals["twisted_ybr"] =
                std::max(rep.max_residuals["twisted_ybr"], (lhs - rhs).norm() / scale);
            ++rep.n_triples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OutsideDomain) throw;
            ++rep.rejected;
        }
    }
    detail::finish_report(rep, tol);
    return rep;
}

}  // namespace ybfact
