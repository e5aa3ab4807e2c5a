#include "ybfact/polyfactor.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace ybfact {

namespace {

// Plain coefficients p_0..p_{d-1} of P (p_d = I implicit): p_{d-k} = (-1)^k a_k.
std::vector<ComplexMatrix> plain_coeffs(const MatrixPolynomial& P) {
    std::vector<ComplexMatrix> p(static_cast<std::size_t>(P.d));
    for (int k = 1; k <= P.d; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        p[static_cast<std::size_t>(P.d - k)] = sign * P.coeffs[static_cast<std::size_t>(k - 1)];
    }
    return p;
}

MatrixPolynomial from_plain(int m, const std::vector<ComplexMatrix>& p) {
    MatrixPolynomial P;
    P.m = m;
    P.d = static_cast<int>(p.size());
    P.coeffs.resize(p.size());
    for (int k = 1; k <= P.d; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        P.coeffs[static_cast<std::size_t>(k - 1)] = sign * p[static_cast<std::size_t>(P.d - k)];
    }
    return P;
}

double coeff_scale(const MatrixPolynomial& P) {
    double s = 1.0;
    for (const auto& a : P.coeffs) s = std::max(s, a.norm());
    return s;
}

// Bijective nearest-neighbor match of partition values onto computed roots.
// Returns, per block, the matched root values in block order.
std::vector<std::vector<Complex>> match_partition(const OrderedSpectrum& roots,
                                                  const SpectrumPartition& partition, int m,
                                                  int d) {
    std::size_t total = 0;
    for (const auto& b : partition.blocks) total += b.size();
    if (static_cast<int>(partition.blocks.size()) != d || total != roots.values.size())
        throw Error(ErrorKind::PartitionMismatch, "partition shape does not cover the root set");
    for (const auto& b : partition.blocks)
        if (static_cast<int>(b.size()) != m)
            throw Error(ErrorKind::PartitionMismatch, "every block must hold m values");

    const double radius = 0.45 * roots.separation;
    std::vector<bool> used(roots.values.size(), false);
    std::vector<std::vector<Complex>> matched(partition.blocks.size());
    for (std::size_t bi = 0; bi < partition.blocks.size(); ++bi) {
        for (const Complex& val : partition.blocks[bi]) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < roots.values.size(); ++r) {
                const double dd = std::abs(val - roots.values[r]);
                if (dd < best_d) {
                    best_d = dd;
                    best = r;
                }
            }
            if (best_d > radius)
                throw Error(ErrorKind::PartitionMismatch,
                            "partition value not among the polynomial roots");
            if (used[best])
                throw Error(ErrorKind::PartitionMismatch,
                            "two partition values matched the same root");
            used[best] = true;
            matched[bi].push_back(roots.values[best]);
        }
    }
    return matched;
}

// Matrix with prescribed eigenpairs: b = V diag(values) V^{-1} where column
// j of V is a kernel vector of P(values[j]).
ComplexMatrix solvent_from_kernels(const MatrixPolynomial& work, const std::vector<Complex>& block,
                                   int m) {
    ComplexMatrix V(m, m);
    for (int j = 0; j < m; ++j) {
        const ComplexMatrix Pl = work.eval(block[static_cast<std::size_t>(j)]);
        Eigen::JacobiSVD<ComplexMatrix> svd(Pl, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double smax = std::max(sv(0), 1.0);
        if (m > 1 && sv(m - 2) < 10.0 * tol::eig_tol * smax)
            throw Error(ErrorKind::DegenerateInstance,
                        "kernel of P(lambda) is not one-dimensional");
        V.col(j) = svd.matrixV().col(m - 1);
    }
    Eigen::FullPivLU<ComplexMatrix> lu(V);
    lu.setThreshold(1e-8);
    if (lu.rank() < m)
        throw Error(ErrorKind::DegenerateInstance, "eigenvector matrix singular at tolerance");
    ComplexMatrix D = ComplexMatrix::Zero(m, m);
    for (int j = 0; j < m; ++j) D(j, j) = block[static_cast<std::size_t>(j)];
    return V * D * lu.inverse();
}

}  // namespace

Factorization make_factorization(int m, std::vector<ComplexMatrix> factors) {
    Factorization f;
    f.m = m;
    f.d = static_cast<int>(factors.size());
    f.factors = std::move(factors);
    std::vector<Complex> all;
    for (const auto& b : f.factors) {
        if (b.rows() != m || b.cols() != m)
            throw Error(ErrorKind::InvalidArgument, "factor size mismatch");
        f.spectra.push_back(eigenvalues_of(b));
        all.insert(all.end(), f.spectra.back().values.begin(), f.spectra.back().values.end());
    }
    // cross-factor disjointness at the same guard as within factors
    make_ordered_spectrum(all);
    return f;
}

MatrixPolynomial expand_factors(int m, const std::vector<ComplexMatrix>& factors) {
    std::vector<ComplexMatrix> p{ComplexMatrix::Identity(m, m)};  // degree-0 polynomial "1"
    for (const auto& b : factors) {
        std::vector<ComplexMatrix> next(p.size() + 1, ComplexMatrix::Zero(m, m));
        for (std::size_t j = 0; j < p.size(); ++j) {
            next[j + 1] += p[j];
            next[j] -= p[j] * b;
        }
        p = std::move(next);
    }
    p.pop_back();  // drop the monic leading identity
    return from_plain(m, p);
}

MatrixPolynomial expand_factors(const Factorization& f) { return expand_factors(f.m, f.factors); }

std::pair<MatrixPolynomial, ComplexMatrix> right_divide(const MatrixPolynomial& P,
                                                        const ComplexMatrix& b) {
    if (P.d < 1) throw Error(ErrorKind::InvalidArgument, "right_divide needs degree >= 1");
    const int m = P.m;
    const auto p = plain_coeffs(P);
    std::vector<ComplexMatrix> q(static_cast<std::size_t>(P.d), ComplexMatrix::Zero(m, m));
    ComplexMatrix carry = ComplexMatrix::Identity(m, m);  // q_{d-1} = p_d = I
    q[static_cast<std::size_t>(P.d - 1)] = carry;
    for (int j = P.d - 1; j >= 1; --j) {
        carry = p[static_cast<std::size_t>(j)] + carry * b;
        q[static_cast<std::size_t>(j - 1)] = carry;
    }
    const ComplexMatrix R = p[0] + carry * b;
    q.pop_back();  // monic leading identity of Q
    return {from_plain(m, q), R};
}

Factorization refactor(const MatrixPolynomial& P, const SpectrumPartition& partition) {
    const int m = P.m, d = P.d;
    const OrderedSpectrum roots = poly_eigenvalues(P);
    const auto matched = match_partition(roots, partition, m, d);

    MatrixPolynomial work = P;
    std::vector<ComplexMatrix> factors(static_cast<std::size_t>(d));
    for (int k = d; k >= 2; --k) {
        const ComplexMatrix b = solvent_from_kernels(work, matched[static_cast<std::size_t>(k - 1)], m);
        auto [Q, R] = right_divide(work, b);
        if (R.norm() > tol::fact_tol * coeff_scale(P))
            throw Error(ErrorKind::DegenerateInstance,
                        "division remainder " + std::to_string(R.norm()) + " above fact_tol");
        factors[static_cast<std::size_t>(k - 1)] = b;
        work = std::move(Q);
    }
    factors[0] = work.coeffs[0];  // degree-1 tail: t - b_1

    Factorization out;
    out.m = m;
    out.d = d;
    out.factors = std::move(factors);
    for (const auto& block : matched) out.spectra.push_back(make_ordered_spectrum(block));

    const MatrixPolynomial back = expand_factors(out);
    double resid = 0.0;
    for (int k = 0; k < d; ++k)
        resid = std::max(resid, (back.coeffs[static_cast<std::size_t>(k)] -
                                 P.coeffs[static_cast<std::size_t>(k)])
                                    .norm());
    if (resid > tol::fact_tol * coeff_scale(P))
        throw Error(ErrorKind::DegenerateInstance,
                    "refactorization residual " + std::to_string(resid) + " above fact_tol");
    return out;
}

std::pair<ComplexMatrix, ComplexMatrix> sylvester_swap(const ComplexMatrix& a1,
                                                       const ComplexMatrix& a2) {
    const ComplexMatrix L = solve_sylvester(a1, a2);
    Eigen::FullPivLU<ComplexMatrix> lu(L);
    lu.setThreshold(1e-10);
    if (lu.rank() < L.rows())
        throw Error(ErrorKind::SingularLambda, "Sylvester solution not invertible at tolerance");
    const ComplexMatrix Linv = lu.inverse();
    return {a1 + Linv, a2 - Linv};
}

TwistedMap<ComplexMatrix> mu_matrix(int m) {
    TwistedMap<ComplexMatrix> map;
    map.name = "matrix-swap(m=" + std::to_string(m) + ")";
    map.guard_min = tol::sep_min;
    map.apply_fn = [](const ComplexMatrix& u, const ComplexMatrix& v) {
        return sylvester_swap(u, v);
    };
    map.margin = [](const ComplexMatrix& u, const ComplexMatrix& v) -> double {
        try {
            const OrderedSpectrum su = eigenvalues_of(u, 0.0);
            const OrderedSpectrum sv = eigenvalues_of(v, 0.0);
            double gap = std::numeric_limits<double>::infinity();
            for (const auto& a : su.values)
                for (const auto& b : sv.values) gap = std::min(gap, std::abs(a - b));
            std::vector<Complex> all = su.values;
            all.insert(all.end(), sv.values.begin(), sv.values.end());
            const double rel_gap = gap / spectral_scale(all);

            const ComplexMatrix L = solve_sylvester(u, v);
            Eigen::JacobiSVD<ComplexMatrix> svd(L);
            const auto& sv_l = svd.singularValues();
            const double lam_margin = sv_l(sv_l.size() - 1) / (1.0 + sv_l(0));
            return std::min(rel_gap, lam_margin);
        } catch (const Error&) {
            return 0.0;
        }
    };
    return map;
}

std::vector<Complex> concatenated_spectrum(const Factorization& f) {
    std::vector<Complex> all;
    for (const auto& s : f.spectra) all.insert(all.end(), s.values.begin(), s.values.end());
    return all;
}

Factorization local_action(const BraidWord& word, Factorization f) {
    const int m = f.m, N = f.d;
    if (word.n_strands != m * N)
        throw Error(ErrorKind::InvalidArgument, "word strand count must equal m*N");
    for (std::size_t k = 0; k < word.letters.size(); ++k) {
        const int i = word.letters[k];
        if (i < 1 || i >= m * N)
            throw Error(ErrorKind::InvalidArgument,
                        "letter " + std::to_string(i) + " out of range");
        if (i % m != 0) {
            // interior: permute order labels inside factor i/m + 1
            const int fi = (i - 1) / m;
            const int p = i - fi * m;  // local position, 1..m-1
            auto& vals = f.spectra[static_cast<std::size_t>(fi)].values;
            std::swap(vals[static_cast<std::size_t>(p - 1)], vals[static_cast<std::size_t>(p)]);
        } else {
            // boundary: exchange the last label of factor a with the first
            // label of factor a+1 through a degree-2 refactorization
            const int a = i / m;
            const auto& s = f.spectra[static_cast<std::size_t>(a - 1)].values;
            const auto& t = f.spectra[static_cast<std::size_t>(a)].values;
            std::vector<Complex> A1(s.begin(), s.end() - 1);
            A1.push_back(t.front());
            std::vector<Complex> A2{s.back()};
            A2.insert(A2.end(), t.begin() + 1, t.end());

            const MatrixPolynomial P2 = expand_factors(
                m, {f.factors[static_cast<std::size_t>(a - 1)], f.factors[static_cast<std::size_t>(a)]});
            const Factorization g = refactor(P2, SpectrumPartition{{A1, A2}});
            f.factors[static_cast<std::size_t>(a - 1)] = g.factors[0];
            f.factors[static_cast<std::size_t>(a)] = g.factors[1];
            f.spectra[static_cast<std::size_t>(a - 1)] = g.spectra[0];
            f.spectra[static_cast<std::size_t>(a)] = g.spectra[1];
        }
    }
    return f;
}

}  // namespace ybfact
