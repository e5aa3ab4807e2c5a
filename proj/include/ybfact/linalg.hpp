#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ybfact/errors.hpp"

namespace ybfact {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Default tolerances. All residual thresholds are relative to the scale of
// the inputs; sep_min is absolute on spectra normalized to unit scale.
namespace tol {
inline constexpr double sep_min = 1e-6;
inline constexpr double eig_tol = 1e-9;
inline constexpr double solve_tol = 1e-10;
inline constexpr double fact_tol = 1e-8;
inline constexpr double tau_min = 0.05;
inline constexpr double constraint_tol = 1e-10;
inline constexpr double zero_tol = 1e-7;
inline constexpr double theta_fact_tol = 1e-6;
inline constexpr double series_tol = 1e-12;
}  // namespace tol

struct EigenPair {
    Complex value;
    ComplexVector vector;  // unit Euclidean norm
};

// An eigenvalue (or root) list whose order is data. Construction rejects
// near-collisions: everything downstream assumes simple, well-separated
// spectra.
struct OrderedSpectrum {
    std::vector<Complex> values;
    double separation = 0.0;  // actual minimum pairwise distance

    std::size_t size() const { return values.size(); }
};

// Monic matrix polynomial P(t) = t^d - a_1 t^{d-1} + a_2 t^{d-2} - ... + (-1)^d a_d.
// coeffs stores a_1..a_d; with the alternating signs, (t-b_1)...(t-b_d)
// expands to a_1 = b_1 + ... + b_d and a_d = b_1 b_2 ... b_d.
struct MatrixPolynomial {
    int m = 0;
    int d = 0;
    std::vector<ComplexMatrix> coeffs;  // a_1, ..., a_d, each m x m

    ComplexMatrix eval(Complex t) const;
};

bool is_finite(const ComplexMatrix& a);

// Scale used by separation guards: max(1, largest |value|).
double spectral_scale(const std::vector<Complex>& values);

double min_pairwise_distance(const std::vector<Complex>& values);

// Sorts by (real, imag) ascending; the deterministic default order.
void canonical_sort(std::vector<Complex>& values);

// Builds an OrderedSpectrum in the given order, enforcing the pairwise
// separation invariant at sep_min relative to spectral scale.
OrderedSpectrum make_ordered_spectrum(std::vector<Complex> values, double sep_min = tol::sep_min);

// Full eig of a square complex matrix. Throws DegenerateSpectrum when two
// eigenvalues are closer than sep_min (relative scale), NoConvergence when
// the solver fails or a residual exceeds eig_tol * |M|.
std::vector<EigenPair> eigen_decompose(const ComplexMatrix& M, double sep_min = tol::sep_min);

// Eigenvalues only, canonically sorted, same genericity guard.
OrderedSpectrum eigenvalues_of(const ComplexMatrix& M, double sep_min = tol::sep_min);

// Orthonormal basis of the numerical kernel {v : |Mv| <= tol * |M|_2}.
// Empty result means trivial kernel at this tolerance.
std::vector<ComplexVector> nullspace(const ComplexMatrix& M, double tol);

// Kronecker product, row-major blocks: (A kron B)(i*p+k, j*q+l) = A(i,j) B(k,l).
ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

// Solves a2 * L - L * a1 = I by vectorizing to an m^2 x m^2 system.
// Throws SpectraOverlap when that system is singular to tolerance, which
// happens exactly when the spectra of a1 and a2 intersect.
ComplexMatrix solve_sylvester(const ComplexMatrix& a1, const ComplexMatrix& a2);

// All m*d roots of det P(t) = 0 via the block-companion linearization,
// canonically ordered. Root near-collisions raise DegenerateSpectrum.
OrderedSpectrum poly_eigenvalues(const MatrixPolynomial& P, double sep_min = tol::sep_min);

// Block companion matrix of P; eigenvalues of the result are the roots of det P.
ComplexMatrix companion_linearization(const MatrixPolynomial& P);

}  // namespace ybfact
