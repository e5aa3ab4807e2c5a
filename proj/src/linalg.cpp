#include "ybfact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ybfact {

bool is_finite(const ComplexMatrix& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

ComplexMatrix MatrixPolynomial::eval(Complex t) const {
    ComplexMatrix acc = ComplexMatrix::Identity(m, m);
    // Horner on t^d - a_1 t^{d-1} + ... : acc <- acc*t - (-1)^{k+1} a_k
    double sign = -1.0;
    for (int k = 0; k < d; ++k) {
        acc = acc * t + sign * coeffs[static_cast<std::size_t>(k)];
        sign = -sign;
    }
    return acc;
}

double spectral_scale(const std::vector<Complex>& values) {
    double s = 1.0;
    for (const auto& v : values) s = std::max(s, std::abs(v));
    return s;
}

double min_pairwise_distance(const std::vector<Complex>& values) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            best = std::min(best, std::abs(values[i] - values[j]));
    return best;
}

void canonical_sort(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

OrderedSpectrum make_ordered_spectrum(std::vector<Complex> values, double sep_min) {
    OrderedSpectrum s;
    s.values = std::move(values);
    s.separation = s.values.size() > 1 ? min_pairwise_distance(s.values)
                                       : std::numeric_limits<double>::infinity();
    if (s.values.size() > 1 && s.separation < sep_min * spectral_scale(s.values))
        throw Error(ErrorKind::DegenerateSpectrum,
                    "minimum pairwise eigenvalue distance " + std::to_string(s.separation) +
                        " below separation guard");
    return s;
}

std::vector<EigenPair> eigen_decompose(const ComplexMatrix& M, double sep_min) {
    if (M.rows() != M.cols())
        throw Error(ErrorKind::InvalidArgument, "eigen_decompose needs a square matrix");
    if (!is_finite(M)) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entries");

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(M, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "complex eigensolver did not converge");

    std::vector<Complex> values(solver.eigenvalues().data(),
                                solver.eigenvalues().data() + solver.eigenvalues().size());
    const double scale = spectral_scale(values);
    if (values.size() > 1 && min_pairwise_distance(values) < sep_min * scale)
        throw Error(ErrorKind::DegenerateSpectrum, "repeated eigenvalue at separation guard");

    const double mnorm = M.norm();
    std::vector<EigenPair> pairs;
    pairs.reserve(values.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        EigenPair p;
        p.value = solver.eigenvalues()(i);
        p.vector = solver.eigenvectors().col(i);
        p.vector /= p.vector.norm();
        const double resid = (M * p.vector - p.value * p.vector).norm();
        if (resid > tol::eig_tol * std::max(mnorm, 1.0))
            throw Error(ErrorKind::NoConvergence, "eigenpair residual above eig_tol");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

OrderedSpectrum eigenvalues_of(const ComplexMatrix& M, double sep_min) {
    if (M.rows() != M.cols())
        throw Error(ErrorKind::InvalidArgument, "eigenvalues_of needs a square matrix");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "complex eigensolver did not converge");
    std::vector<Complex> values(solver.eigenvalues().data(),
                                solver.eigenvalues().data() + solver.eigenvalues().size());
    canonical_sort(values);
    return make_ordered_spectrum(std::move(values), sep_min);
}

std::vector<ComplexVector> nullspace(const ComplexMatrix& M, double tol) {
    if (tol <= 0) throw Error(ErrorKind::InvalidArgument, "nullspace tolerance must be positive");
    Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    std::vector<ComplexVector> basis;
    for (Eigen::Index i = 0; i < M.cols(); ++i) {
        const double s = i < sv.size() ? sv(i) : 0.0;
        if (s <= tol * smax) basis.push_back(svd.matrixV().col(i));
    }
    return basis;
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

ComplexMatrix solve_sylvester(const ComplexMatrix& a1, const ComplexMatrix& a2) {
    const Eigen::Index m = a1.rows();
    if (a1.cols() != m || a2.rows() != m || a2.cols() != m)
        throw Error(ErrorKind::InvalidArgument, "solve_sylvester needs two m x m matrices");

    // Column-major vec: vec(a2 L) = (I kron a2) vec(L), vec(L a1) = (a1^T kron I) vec(L).
    const ComplexMatrix I = ComplexMatrix::Identity(m, m);
    const ComplexMatrix K = kron(I, a2) - kron(a1.transpose(), I);

    Eigen::FullPivLU<ComplexMatrix> lu(K);
    lu.setThreshold(tol::sep_min / 10.0);
    if (lu.rank() < K.rows())
        throw Error(ErrorKind::SpectraOverlap, "Sylvester system singular: spectra intersect");

    ComplexVector rhs(m * m);
    Eigen::Map<ComplexMatrix>(rhs.data(), m, m) = I;
    ComplexVector x = lu.solve(rhs);
    ComplexMatrix L = Eigen::Map<ComplexMatrix>(x.data(), m, m);

    const double resid = (a2 * L - L * a1 - I).norm();
    const double bound = tol::solve_tol * (a1.norm() + a2.norm() + 1.0);
    if (!is_finite(L) || resid > bound)
        throw Error(ErrorKind::SpectraOverlap,
                    "Sylvester residual " + std::to_string(resid) + " above solve_tol");
    return L;
}

ComplexMatrix companion_linearization(const MatrixPolynomial& P) {
    const int m = P.m, d = P.d;
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "companion needs degree >= 1");
    ComplexMatrix C = ComplexMatrix::Zero(m * d, m * d);
    for (int k = 1; k < d; ++k)
        C.block(k * m, (k - 1) * m, m, m) = ComplexMatrix::Identity(m, m);
    // Plain coefficient of t^j is (-1)^{d-j} a_{d-j}; last block column holds -p_j.
    for (int j = 0; j < d; ++j) {
        const double sign = ((d - j) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{d-j}
        C.block(j * m, (d - 1) * m, m, m) = -sign * P.coeffs[static_cast<std::size_t>(d - j - 1)];
    }
    return C;
}

OrderedSpectrum poly_eigenvalues(const MatrixPolynomial& P, double sep_min) {
    for (const auto& a : P.coeffs)
        if (a.rows() != P.m || a.cols() != P.m || !is_finite(a))
            throw Error(ErrorKind::InvalidArgument, "bad polynomial coefficient");
    return eigenvalues_of(companion_linearization(P), sep_min);
}

}  // namespace ybfact
