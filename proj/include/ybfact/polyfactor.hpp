#pragma once

#include <utility>
#include <vector>

#include "ybfact/linalg.hpp"
#include "ybfact/twisted_map.hpp"

namespace ybfact {

// Ordered factorization P(t) = (t - b_1)...(t - b_d) with the spectrum of
// every factor carried as ordered data (the order labels are what the local
// symmetric-group action permutes).
struct Factorization {
    int m = 0;
    int d = 0;
    std::vector<ComplexMatrix> factors;
    std::vector<OrderedSpectrum> spectra;
};

// Pairwise-disjoint blocks A_1, ..., A_d of m eigenvalues each.
struct SpectrumPartition {
    std::vector<std::vector<Complex>> blocks;
};

// Computes spectra of the given factors, enforcing the Factorization
// invariants (simple spectra, pairwise disjoint across factors).
Factorization make_factorization(int m, std::vector<ComplexMatrix> factors);

// Coefficients of the ordered product (t-b_1)...(t-b_d) in the alternating
// sign convention: for d = 2, a_1 = b_1 + b_2 and a_2 = b_1 b_2.
MatrixPolynomial expand_factors(int m, const std::vector<ComplexMatrix>& factors);
MatrixPolynomial expand_factors(const Factorization& f);

// P(t) = Q(t)(t - b) + R via the right-Horner recurrence; R equals the
// right evaluation sum_k p_k b^k.
std::pair<MatrixPolynomial, ComplexMatrix> right_divide(const MatrixPolynomial& P,
                                                        const ComplexMatrix& b);

// Unique refactorization with prescribed spectrum blocks: builds the last
// factor from kernel vectors of P(lambda), divides, recurses. Blocks are
// matched to the computed roots by nearest-neighbor assignment; the output
// spectra list the matched roots in block order.
Factorization refactor(const MatrixPolynomial& P, const SpectrumPartition& partition);

// Degree-2 swap: returns (a1 + L^{-1}, a2 - L^{-1}) with a2 L - L a1 = I, so
// that (t-a1)(t-a2) = (t-b1)(t-b2) with the spectra exchanged.
std::pair<ComplexMatrix, ComplexMatrix> sylvester_swap(const ComplexMatrix& a1,
                                                       const ComplexMatrix& a2);

// The twisted transposition on Mat_m x Mat_m induced by sylvester_swap.
TwistedMap<ComplexMatrix> mu_matrix(int m);

// Local S_{mN} action on ordered factorizations: interior letters permute
// order labels inside one factor, letters at multiples of m couple two
// adjacent factors through a degree-2 refactorization.
Factorization local_action(const BraidWord& word, Factorization f);

// Concatenation of the per-factor ordered spectra (the strand labels).
std::vector<Complex> concatenated_spectrum(const Factorization& f);

}  // namespace ybfact
