#pragma once

#include <vector>

#include "ybfact/linalg.hpp"
#include "ybfact/polyfactor.hpp"
#include "ybfact/twisted_map.hpp"

namespace ybfact {

// The lattice generated by 1 and tau.
struct Lattice {
    Complex tau;
};

// Validates the series-convergence guard Im(tau) >= tau_min.
Lattice make_lattice(Complex tau);

// gamma_1^m = gamma_2^m = 1 and gamma_2 gamma_1 = eps gamma_1 gamma_2 with a
// primitive m-th root eps; gamma_1 diagonal, gamma_2 the cyclic shift.
struct HeisenbergPair {
    int m = 0;
    Complex epsilon;
    ComplexMatrix gamma1;
    ComplexMatrix gamma2;
};

HeisenbergPair heisenberg_pair(int m);

// Scalar basis of the order-n space with parameter c: theta_alpha satisfies
//   theta_a(z + 1/n)   = e^{2 pi i a/n}                                theta_a(z)
//   theta_a(z + tau/n) = e^{-2 pi i (z - (n-1)/(2n) tau - c/n)}        theta_{a+1}(z)
Complex theta_basis_eval(int n, Complex c, const Lattice& lat, int alpha, Complex z);
std::vector<Complex> theta_basis_eval_all(int n, Complex c, const Lattice& lat, Complex z);

// Element of the m^2 n-dimensional matrix theta space: holomorphic
// f : C -> Mat_m with
//   f(z + 1/m)   = gamma_1^{-1} f(z) gamma_1
//   f(z + tau/m) = e^{-2 pi i (m n z - c)} gamma_2^{-1} f(z) gamma_2
// stored as coefficient matrices in the scalar basis of order m^2 n with
// parameter c1 = m c + tau m n (1-m)/2 (which makes the coefficient linking
// factor exactly one).
struct ThetaSection {
    int n = 0;
    int m = 0;
    Complex c;
    Lattice lattice;
    Complex c1;
    std::vector<ComplexMatrix> coeffs;  // one m x m matrix per basis index, m^2 n entries
};

// Computes the nullspace of the assembled quasi-periodicity constraints and
// checks its dimension against m^2 n (DimensionMismatch otherwise). The
// returned sections are orthonormal in coefficients, then gauge-normalized.
std::vector<ThetaSection> mtheta_basis(int n, int m, Complex c, const Lattice& lat);

ComplexMatrix mtheta_eval(const ThetaSection& f, Complex z);

// Gauge: divides by the first coefficient entry of largest magnitude, so the
// chosen entry becomes exactly 1.
ThetaSection normalize_section(ThetaSection f);

// Coefficient-stack Frobenius distance between the normalized forms.
double section_distance(const ThetaSection& a, const ThetaSection& b);

struct ZeroSet {
    std::vector<Complex> points;  // canonical representatives mod (1/m)Gamma
};

// Canonical representative of z modulo (1/m)Gamma; half-open cell with a
// small dead band at the far edges.
Complex reduce_to_cell(Complex z, const Lattice& lat, int m);

// Distance between classes mod (1/m)Gamma (inputs need not be canonical).
double torus_distance(Complex a, Complex b, const Lattice& lat, int m);

// Distance from v to the nearest point of scale*Gamma.
double lattice_distance(Complex v, const Lattice& lat, double scale = 1.0);

// All mn zeros of det f modulo (1/m)Gamma: coarse grid, damped Newton
// refinement, dedup, count certification.
ZeroSet det_zeros(const ThetaSection& f);

// Sum-rule residual of a zero set: distance of m*(sum of zeros) - m c - m n/2
// from the lattice. Zero for exact sections; the m=1 case is the classical
// congruence sum = c + n/2 (mod Gamma).
double sum_rule_residual(const ZeroSet& zeros, const ThetaSection& f);

// The unique (up to scale) section of degree n with f(lambda_a) v_a = 0.
// The space parameter is determined by the zero-sum congruence:
// c = sum(lambdas) - n/2, taken exactly as given.
ThetaSection interpolate(const std::vector<Complex>& lambdas, const std::vector<ComplexVector>& vs,
                         int n, int m, const Lattice& lat);

// Unique factorization f = f_1 ... f_n into degree-1 sections with
// prescribed zero blocks, built right to left by interpolation and
// least-squares quotients. Factors are gauge-normalized.
std::vector<ThetaSection> theta_refactor(const ThetaSection& f, const SpectrumPartition& partition);

// Least-squares fit of the pointwise product f*g in the degree-(nf+ng)
// space, residual-checked at held-out points.
ThetaSection product_section(const ThetaSection& f, const ThetaSection& g);

// Carrier element for the theta twisted transposition: a degree-1 section
// together with its (ordered) zero list. Campaign inputs are built by
// interpolation from canonical-cell zeros, so the space parameters round-trip
// exactly under the map.
struct ThetaPoint {
    ThetaSection section;
    std::vector<Complex> zeros;
};

template <>
struct Carrier<ThetaPoint> {
    static constexpr const char* tag = "theta-section";
    static double norm(const ThetaPoint& x) {
        double s = 0.0;
        for (const auto& a : x.section.coeffs) s += a.squaredNorm();
        return std::sqrt(s);
    }
    static double distance(const ThetaPoint& a, const ThetaPoint& b) {
        return section_distance(a.section, b.section);
    }
    // Tilts the kernel vector at the first zero and re-interpolates, so the
    // result is a genuine section of the same space that is wrong by ~eps.
    static ThetaPoint perturb(const ThetaPoint& x, double eps);
};

// mu(f, g) = (f1, g1) with f g = f1 g1 and the zero sets exchanged.
TwistedMap<ThetaPoint> mu_theta(int m, const Lattice& lat);

// Local S_{mN} action on tuples of degree-1 sections with ordered zeros.
std::vector<ThetaPoint> theta_local_action(const BraidWord& word, std::vector<ThetaPoint> fs);

// Builds a ThetaPoint by interpolation from zeros and kernel vectors.
ThetaPoint make_theta_point(const std::vector<Complex>& zeros,
                            const std::vector<ComplexVector>& vs, int m, const Lattice& lat);

}  // namespace ybfact
