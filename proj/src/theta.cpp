#include "ybfact/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace ybfact {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kTwoPiI{0.0, 2.0 * kPi};

double cell_span(const Lattice& lat, int m) {
    return std::min(1.0, std::abs(lat.tau)) / static_cast<double>(m);
}

// Deterministic low-discrepancy interior points of the (1/m) cell.
Complex cell_point(int k, const Lattice& lat, int m) {
    const double a1 = 0.7548776662466927;  // plastic-number Kronecker sequence
    const double a2 = 0.5698402909980532;
    double u = std::fmod(0.5 + (k + 1) * a1, 1.0);
    double v = std::fmod(0.5 + (k + 1) * a2, 1.0);
    u = 0.05 + 0.90 * u;
    v = 0.05 + 0.90 * v;
    return (u + v * lat.tau) / static_cast<double>(m);
}

}  // namespace

Lattice make_lattice(Complex tau) {
    if (!(tau.imag() >= tol::tau_min))
        throw Error(ErrorKind::InvalidArgument,
                    "Im(tau) must be >= " + std::to_string(tol::tau_min));
    return Lattice{tau};
}

HeisenbergPair heisenberg_pair(int m) {
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "m must be positive");
    HeisenbergPair h;
    h.m = m;
    h.epsilon = std::polar(1.0, 2.0 * kPi / m);
    h.gamma1 = ComplexMatrix::Zero(m, m);
    for (int k = 0; k < m; ++k)
        h.gamma1(k, k) = std::polar(1.0, -2.0 * kPi * ((k + 1) % m) / m);
    h.gamma2 = ComplexMatrix::Zero(m, m);
    for (int k = 0; k < m; ++k) h.gamma2((k + 1) % m, k) = 1.0;
    return h;
}

Complex theta_basis_eval(int n, Complex c, const Lattice& lat, int alpha, Complex z) {
    const std::vector<Complex> all = theta_basis_eval_all(n, c, lat, z);
    return all[static_cast<std::size_t>(((alpha % n) + n) % n)];
}

std::vector<Complex> theta_basis_eval_all(int n, Complex c, const Lattice& lat, Complex z) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "basis order must be positive");
    const Complex tau = lat.tau;
    const double imt = tau.imag();
    // Truncation: the tail beyond J is below ~1e-16 of the peak term.
    const double L =
        (n - 1) * imt + std::abs(c.imag()) + n * std::abs(z.imag()) + n * imt;
    const double x = L / (n * imt);
    const int J = static_cast<int>(std::ceil(x + std::sqrt(x * x + 40.0 / (kPi * n * imt)))) + 2;

    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (int alpha = 0; alpha < n; ++alpha) {
        Complex sum = 0.0;
        for (int j = -J; j <= J; ++j) {
            const Complex e = tau * (alpha * (alpha - n) / (2.0 * n) + double(j) * alpha +
                                     n * double(j) * (j - 1) / 2.0) -
                              c * (alpha / double(n) + double(j)) +
                              double(alpha + double(j) * n) * z;
            sum += std::exp(kTwoPiI * e);
        }
        out[static_cast<std::size_t>(alpha)] = sum;
    }
    return out;
}

std::vector<ThetaSection> mtheta_basis(int n, int m, Complex c, const Lattice& lat) {
    if (n < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "need n >= 1, m >= 1");
    const int N1 = m * m * n;
    const int unknowns = m * m * N1;
    const HeisenbergPair h = heisenberg_pair(m);
    const Complex c1 = double(m) * c + lat.tau * (m * n * (1.0 - m) / 2.0);
    const Complex kB = std::exp(-kTwoPiI * (c + lat.tau * (n * (1.0 - m) / 2.0) - c1 / double(m)));

    const ComplexMatrix g1i = h.gamma1.inverse();
    const ComplexMatrix g2i = h.gamma2.transpose();  // permutation matrix

    ComplexMatrix A = ComplexMatrix::Zero(2 * m * m * N1, unknowns);
    auto idx = [m](int a, int k, int l) { return a * m * m + k * m + l; };
    int row = 0;
    // z -> z + 1/m:  e^{2 pi i a/m} phi_a = gamma_1^{-1} phi_a gamma_1
    for (int a = 0; a < N1; ++a) {
        const Complex lam = std::polar(1.0, 2.0 * kPi * (a % m) / m);
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) {
                A(row, idx(a, k, l)) += lam;
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q)
                        A(row, idx(a, p, q)) -= g1i(k, p) * h.gamma1(q, l);
                ++row;
            }
    }
    // z -> z + tau/m:  gamma_2^{-1} phi_a gamma_2 = kB phi_{a - mn}
    for (int a = 0; a < N1; ++a) {
        const int b = ((a - m * n) % N1 + N1) % N1;
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) {
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q)
                        A(row, idx(a, p, q)) += g2i(k, p) * h.gamma2(q, l);
                A(row, idx(b, k, l)) -= kB;
                ++row;
            }
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol::constraint_tol * smax) ++dim;
    if (dim != m * m * n)
        throw Error(ErrorKind::DimensionMismatch,
                    "constraint nullspace dimension " + std::to_string(dim) + ", expected " +
                        std::to_string(m * m * n));

    std::vector<ThetaSection> basis;
    basis.reserve(static_cast<std::size_t>(dim));
    for (int kidx = 0; kidx < dim; ++kidx) {
        const ComplexVector x = svd.matrixV().col(unknowns - dim + kidx);
        ThetaSection s;
        s.n = n;
        s.m = m;
        s.c = c;
        s.lattice = lat;
        s.c1 = c1;
        s.coeffs.assign(static_cast<std::size_t>(N1), ComplexMatrix::Zero(m, m));
        for (int a = 0; a < N1; ++a)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    s.coeffs[static_cast<std::size_t>(a)](k, l) = x(idx(a, k, l));
        basis.push_back(normalize_section(std::move(s)));
    }
    return basis;
}

ComplexMatrix mtheta_eval(const ThetaSection& f, Complex z) {
    const int N1 = f.m * f.m * f.n;
    const std::vector<Complex> th = theta_basis_eval_all(N1, f.c1, f.lattice, z);
    ComplexMatrix out = ComplexMatrix::Zero(f.m, f.m);
    for (int a = 0; a < N1; ++a) out += f.coeffs[static_cast<std::size_t>(a)] * th[static_cast<std::size_t>(a)];
    return out;
}

ThetaSection normalize_section(ThetaSection f) {
    double best = -1.0;
    Complex pivot = 0.0;
    for (const auto& mat : f.coeffs)
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
            for (Eigen::Index j = 0; j < mat.cols(); ++j)
                if (std::abs(mat(i, j)) > best) {
                    best = std::abs(mat(i, j));
                    pivot = mat(i, j);
                }
    if (best <= 0.0) throw Error(ErrorKind::InvalidArgument, "cannot normalize a zero section");
    for (auto& mat : f.coeffs) mat /= pivot;
    return f;
}

double section_distance(const ThetaSection& a, const ThetaSection& b) {
    if (a.n != b.n || a.m != b.m)
        throw Error(ErrorKind::InvalidArgument, "section shapes differ");
    const ThetaSection na = normalize_section(a);
    const ThetaSection nb = normalize_section(b);
    double s = 0.0;
    for (std::size_t i = 0; i < na.coeffs.size(); ++i)
        s += (na.coeffs[i] - nb.coeffs[i]).squaredNorm();
    return std::sqrt(s);
}

Complex reduce_to_cell(Complex z, const Lattice& lat, int m) {
    const Complex w = double(m) * z;
    double t = w.imag() / lat.tau.imag();
    double s = w.real() - t * lat.tau.real();
    s -= std::floor(s);
    t -= std::floor(t);
    // half-open cell with a dead band: representatives hugging the far edge
    // belong to the next cell's origin
    if (s > 1.0 - tol::zero_tol) s = 0.0;
    if (t > 1.0 - tol::zero_tol) t = 0.0;
    return (s + t * lat.tau) / double(m);
}

double torus_distance(Complex a, Complex b, const Lattice& lat, int m) {
    const Complex d = reduce_to_cell(a, lat, m) - reduce_to_cell(b, lat, m);
    double best = std::numeric_limits<double>::infinity();
    for (int p = -1; p <= 1; ++p)
        for (int q = -1; q <= 1; ++q)
            best = std::min(best, std::abs(d + (double(p) + double(q) * lat.tau) / double(m)));
    return best;
}

double lattice_distance(Complex v, const Lattice& lat, double scale) {
    const double t = v.imag() / (scale * lat.tau.imag());
    const double s = v.real() / scale - t * lat.tau.real();
    double best = std::numeric_limits<double>::infinity();
    for (double a : {std::floor(s), std::floor(s) + 1.0})
        for (double b : {std::floor(t), std::floor(t) + 1.0})
            best = std::min(best, std::abs(v - scale * (a + b * lat.tau)));
    return best;
}

namespace {

std::vector<Complex> find_zeros_on_grid(const ThetaSection& f, int G) {
    const Lattice& lat = f.lattice;
    const int m = f.m;
    const double span = cell_span(lat, m);
    auto det_at = [&](Complex z) { return Complex(mtheta_eval(f, z).determinant()); };

    Eigen::MatrixXd mag(G + 2, G + 2);
    std::vector<std::vector<Complex>> pts(static_cast<std::size_t>(G + 2),
                                          std::vector<Complex>(static_cast<std::size_t>(G + 2)));
    for (int i = 0; i < G + 2; ++i)
        for (int j = 0; j < G + 2; ++j) {
            const Complex z = ((i - 0.5) / G + (j - 0.5) / G * lat.tau) / double(m);
            pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = z;
            mag(i, j) = std::abs(det_at(z));
        }
    const double scale = mag.maxCoeff();
    if (scale <= 0.0) throw Error(ErrorKind::InvalidArgument, "det f vanishes identically");

    std::vector<Complex> zeros;
    const double h = 1e-5 * span;
    for (int i = 1; i <= G; ++i)
        for (int j = 1; j <= G; ++j) {
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if (mag(i + di, j + dj) < mag(i, j)) {
                        is_min = false;
                        break;
                    }
            if (!is_min) continue;

            Complex z = pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Complex g = det_at(z);
            for (int it = 0; it < 60; ++it) {
                const Complex dg = (det_at(z + h) - det_at(z - h)) / (2.0 * h);
                if (std::abs(dg) == 0.0) break;
                const Complex step = -g / dg;
                double damp = 1.0;
                Complex znew = z + step;
                Complex gnew = det_at(znew);
                while (damp > 1e-4 && std::abs(gnew) > std::abs(g)) {
                    damp *= 0.5;
                    znew = z + damp * step;
                    gnew = det_at(znew);
                }
                z = znew;
                g = gnew;
                if (std::abs(step) * damp < 1e-13 || std::abs(g) <= 1e-13 * scale) break;
            }
            if (std::abs(g) > tol::zero_tol * scale) continue;

            const Complex zc = reduce_to_cell(z, lat, m);
            bool dup = false;
            for (const Complex& w : zeros)
                if (torus_distance(zc, w, lat, m) < 1e-8) {
                    dup = true;
                    break;
                }
            if (!dup) zeros.push_back(zc);
        }
    return zeros;
}

}  // namespace

ZeroSet det_zeros(const ThetaSection& f) {
    const int want = f.m * f.n;
    std::vector<Complex> zeros;
    for (int G : {40, 80, 160}) {
        zeros = find_zeros_on_grid(f, G);
        if (static_cast<int>(zeros.size()) == want) break;
    }
    if (static_cast<int>(zeros.size()) != want)
        throw Error(ErrorKind::ZeroCountMismatch,
                    "found " + std::to_string(zeros.size()) + " zeros, expected " +
                        std::to_string(want));
    for (std::size_t i = 0; i < zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zeros.size(); ++j)
            if (torus_distance(zeros[i], zeros[j], f.lattice, f.m) < tol::sep_min)
                throw Error(ErrorKind::DegenerateZeros, "near-double zero of det f");
    canonical_sort(zeros);
    return ZeroSet{std::move(zeros)};
}

double sum_rule_residual(const ZeroSet& zeros, const ThetaSection& f) {
    Complex sum = 0.0;
    for (const Complex& z : zeros.points) sum += z;
    const Complex defect = double(f.m) * sum - double(f.m) * f.c - f.m * f.n / 2.0;
    return lattice_distance(defect, f.lattice);
}

ThetaSection interpolate(const std::vector<Complex>& lambdas, const std::vector<ComplexVector>& vs,
                         int n, int m, const Lattice& lat) {
    const int mn = m * n;
    if (static_cast<int>(lambdas.size()) != mn || static_cast<int>(vs.size()) != mn)
        throw Error(ErrorKind::InvalidArgument, "need exactly m*n interpolation points");
    for (const auto& v : vs)
        if (v.size() != m || v.norm() == 0.0)
            throw Error(ErrorKind::InvalidArgument, "interpolation vectors must be nonzero");
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t j = i + 1; j < lambdas.size(); ++j)
            if (torus_distance(lambdas[i], lambdas[j], lat, m) < tol::sep_min)
                throw Error(ErrorKind::DegenerateInstance, "interpolation points too close");

    // zero-sum congruence fixes the space parameter
    Complex c = -n / 2.0;
    for (const Complex& l : lambdas) c += l;

    const std::vector<ThetaSection> basis = mtheta_basis(n, m, c, lat);
    const int D = static_cast<int>(basis.size());
    ComplexMatrix E(m * mn, D);
    for (int b = 0; b < mn; ++b) {
        for (int k = 0; k < D; ++k) {
            const ComplexVector col =
                mtheta_eval(basis[static_cast<std::size_t>(k)], lambdas[static_cast<std::size_t>(b)]) *
                vs[static_cast<std::size_t>(b)];
            E.block(b * m, k, m, 1) = col;
        }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(E, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = std::max(sv(0), 1e-300);
    int kdim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol::constraint_tol * smax) ++kdim;
    if (kdim != 1)
        throw Error(ErrorKind::NonUniqueSolution,
                    "interpolation kernel dimension " + std::to_string(kdim) + ", expected 1");
    const ComplexVector x = svd.matrixV().col(D - 1);

    ThetaSection out = basis[0];
    for (auto& mat : out.coeffs) mat.setZero();
    for (int k = 0; k < D; ++k)
        for (std::size_t a = 0; a < out.coeffs.size(); ++a)
            out.coeffs[a] += x(k) * basis[static_cast<std::size_t>(k)].coeffs[a];
    return normalize_section(std::move(out));
}

namespace {

// Least-squares fit of prescribed m x m values at sample points in the
// degree-n space with parameter c. Returns the fitted section (no gauge).
ThetaSection fit_section(int n, int m, Complex c, const Lattice& lat,
                         const std::vector<Complex>& points,
                         const std::vector<ComplexMatrix>& values) {
    const std::vector<ThetaSection> basis = mtheta_basis(n, m, c, lat);
    const int D = static_cast<int>(basis.size());
    const int K = static_cast<int>(points.size());
    ComplexMatrix A(K * m * m, D);
    ComplexVector rhs(K * m * m);
    for (int s = 0; s < K; ++s) {
        for (int k = 0; k < D; ++k) {
            const ComplexMatrix B = mtheta_eval(basis[static_cast<std::size_t>(k)],
                                                points[static_cast<std::size_t>(s)]);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) A(s * m * m + i * m + j, k) = B(i, j);
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                rhs(s * m * m + i * m + j) = values[static_cast<std::size_t>(s)](i, j);
    }
    const ComplexVector x = A.completeOrthogonalDecomposition().solve(rhs);
    ThetaSection out = basis[0];
    for (auto& mat : out.coeffs) mat.setZero();
    for (int k = 0; k < D; ++k)
        for (std::size_t a = 0; a < out.coeffs.size(); ++a)
            out.coeffs[a] += x(k) * basis[static_cast<std::size_t>(k)].coeffs[a];
    return out;
}

// g with h = g * fk, fitted away from the zeros of fk and validated at
// held-out points (the poles must cancel for a genuine factor).
ThetaSection quotient_fit(const ThetaSection& h, const ThetaSection& fk,
                          const std::vector<Complex>& fk_zeros, int n_out) {
    const int m = h.m;
    const Lattice& lat = h.lattice;
    const double span = cell_span(lat, m);
    const int K_fit = 2 * n_out + 6;
    const int K_val = 6;

    std::vector<Complex> pts;
    int k = 0;
    while (static_cast<int>(pts.size()) < K_fit + K_val && k < 4000) {
        const Complex z = cell_point(k++, lat, m);
        double gap = std::numeric_limits<double>::infinity();
        for (const Complex& w : fk_zeros) gap = std::min(gap, torus_distance(z, w, lat, m));
        if (gap >= 0.1 * span) pts.push_back(z);
    }
    if (static_cast<int>(pts.size()) < K_fit + K_val)
        throw Error(ErrorKind::DegenerateInstance, "could not place quotient sample points");

    std::vector<Complex> fit_pts(pts.begin(), pts.begin() + K_fit);
    std::vector<ComplexMatrix> values;
    values.reserve(fit_pts.size());
    for (const Complex& z : fit_pts) {
        const ComplexMatrix fkz = mtheta_eval(fk, z);
        values.push_back(mtheta_eval(h, z) * fkz.fullPivLu().inverse());
    }
    ThetaSection g = fit_section(n_out, m, h.c - fk.c, lat, fit_pts, values);

    for (int s = K_fit; s < K_fit + K_val; ++s) {
        const Complex z = pts[static_cast<std::size_t>(s)];
        const ComplexMatrix lhs = mtheta_eval(g, z) * mtheta_eval(fk, z);
        const ComplexMatrix rhs = mtheta_eval(h, z);
        const double resid = (lhs - rhs).norm() / (1.0 + rhs.norm());
        if (resid > tol::theta_fact_tol)
            throw Error(ErrorKind::QuotientResidual,
                        "quotient residual " + std::to_string(resid) + " at held-out point");
    }
    return g;
}

std::vector<ThetaSection> refactor_with_blocks(const ThetaSection& f,
                                               const std::vector<std::vector<Complex>>& blocks) {
    const int m = f.m, n = f.n;
    const Lattice& lat = f.lattice;
    std::vector<ThetaSection> factors(static_cast<std::size_t>(n));
    ThetaSection work = f;
    for (int k = n; k >= 2; --k) {
        const auto& block = blocks[static_cast<std::size_t>(k - 1)];
        std::vector<ComplexVector> kernels;
        kernels.reserve(block.size());
        for (const Complex& lam : block) {
            const ComplexMatrix Fl = mtheta_eval(work, lam);
            Eigen::JacobiSVD<ComplexMatrix> svd(Fl, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            if (m > 1 && sv(m - 2) < 10.0 * tol::eig_tol * std::max(sv(0), 1.0))
                throw Error(ErrorKind::DegenerateInstance,
                            "kernel of f(lambda) is not one-dimensional");
            kernels.push_back(svd.matrixV().col(m - 1));
        }
        ThetaSection fk = interpolate(block, kernels, 1, m, lat);
        work = quotient_fit(work, fk, block, k - 1);
        factors[static_cast<std::size_t>(k - 1)] = std::move(fk);
    }
    factors[0] = normalize_section(std::move(work));

    // certify the product against f at fresh points, up to one global scalar
    std::vector<Complex> pts;
    for (int k = 0; k < 8; ++k) pts.push_back(cell_point(1000 + 17 * k, lat, m));
    Complex num = 0.0;
    double den = 0.0;
    std::vector<ComplexMatrix> prods, fvals;
    for (const Complex& z : pts) {
        ComplexMatrix p = ComplexMatrix::Identity(m, m);
        for (const auto& fac : factors) p *= mtheta_eval(fac, z);
        const ComplexMatrix fz = mtheta_eval(f, z);
        num += (p.conjugate().cwiseProduct(fz)).sum();
        den += p.squaredNorm();
        prods.push_back(p);
        fvals.push_back(fz);
    }
    const Complex scale = num / den;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double resid = (fvals[i] - scale * prods[i]).norm() / (1.0 + fvals[i].norm());
        if (resid > tol::theta_fact_tol)
            throw Error(ErrorKind::QuotientResidual,
                        "factor product residual " + std::to_string(resid));
    }
    return factors;
}

// Nearest-neighbor match of prescribed blocks onto the canonical zeros.
std::vector<std::vector<Complex>> match_blocks(const ZeroSet& zeros,
                                               const SpectrumPartition& partition,
                                               const Lattice& lat, int m, int n) {
    std::size_t total = 0;
    for (const auto& b : partition.blocks) total += b.size();
    if (static_cast<int>(partition.blocks.size()) != n || total != zeros.points.size())
        throw Error(ErrorKind::PartitionMismatch, "partition shape does not cover the zero set");
    for (const auto& b : partition.blocks)
        if (static_cast<int>(b.size()) != m)
            throw Error(ErrorKind::PartitionMismatch, "every block must hold m zeros");

    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zeros.points.size(); ++i)
        for (std::size_t j = i + 1; j < zeros.points.size(); ++j)
            sep = std::min(sep, torus_distance(zeros.points[i], zeros.points[j], lat, m));
    const double radius = total > 1 ? 0.45 * sep : std::numeric_limits<double>::infinity();

    std::vector<bool> used(zeros.points.size(), false);
    std::vector<std::vector<Complex>> matched(partition.blocks.size());
    for (std::size_t bi = 0; bi < partition.blocks.size(); ++bi) {
        for (const Complex& val : partition.blocks[bi]) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < zeros.points.size(); ++r) {
                const double dd = torus_distance(val, zeros.points[r], lat, m);
                if (dd < best_d) {
                    best_d = dd;
                    best = r;
                }
            }
            if (best_d > radius || used[best])
                throw Error(ErrorKind::PartitionMismatch,
                            "partition value does not match a distinct zero of det f");
            used[best] = true;
            matched[bi].push_back(zeros.points[best]);
        }
    }
    return matched;
}

}  // namespace

std::vector<ThetaSection> theta_refactor(const ThetaSection& f, const SpectrumPartition& partition) {
    const ZeroSet zeros = det_zeros(f);
    const auto blocks = match_blocks(zeros, partition, f.lattice, f.m, f.n);
    if (f.n == 1) return {normalize_section(f)};
    return refactor_with_blocks(f, blocks);
}

ThetaSection product_section(const ThetaSection& f, const ThetaSection& g) {
    if (f.m != g.m) throw Error(ErrorKind::InvalidArgument, "section sizes differ");
    if (f.lattice.tau != g.lattice.tau)
        throw Error(ErrorKind::InvalidArgument, "sections live on different lattices");
    const int m = f.m;
    const Lattice& lat = f.lattice;
    const int n_h = f.n + g.n;
    const int K_fit = 2 * n_h + 6;
    const int K_val = 6;

    std::vector<Complex> pts;
    for (int k = 0; k < K_fit + K_val; ++k) pts.push_back(cell_point(k, lat, m));
    std::vector<Complex> fit_pts(pts.begin(), pts.begin() + K_fit);
    std::vector<ComplexMatrix> values;
    values.reserve(fit_pts.size());
    for (const Complex& z : fit_pts) values.push_back(mtheta_eval(f, z) * mtheta_eval(g, z));

    ThetaSection h = fit_section(n_h, m, f.c + g.c, lat, fit_pts, values);

    for (int s = K_fit; s < K_fit + K_val; ++s) {
        const Complex z = pts[static_cast<std::size_t>(s)];
        const ComplexMatrix rhs = mtheta_eval(f, z) * mtheta_eval(g, z);
        const double resid = (mtheta_eval(h, z) - rhs).norm() / (1.0 + rhs.norm());
        if (resid > tol::theta_fact_tol)
            throw Error(ErrorKind::QuotientResidual,
                        "product fit residual " + std::to_string(resid));
    }
    return h;
}

ThetaPoint make_theta_point(const std::vector<Complex>& zeros,
                            const std::vector<ComplexVector>& vs, int m, const Lattice& lat) {
    ThetaPoint p;
    p.zeros = zeros;
    p.section = interpolate(zeros, vs, 1, m, lat);
    return p;
}

ThetaPoint Carrier<ThetaPoint>::perturb(const ThetaPoint& x, double eps) {
    const int m = x.section.m;
    std::vector<ComplexVector> vs;
    for (const Complex& lam : x.zeros) {
        Eigen::JacobiSVD<ComplexMatrix> svd(mtheta_eval(x.section, lam), Eigen::ComputeFullV);
        vs.push_back(svd.matrixV().col(m - 1));
    }
    if (m > 1) {
        // any unit vector orthogonal to the first kernel vector
        ComplexVector w = ComplexVector::Unit(m, 0);
        if (std::abs(vs[0].dot(w)) > 0.9) w = ComplexVector::Unit(m, 1);
        w -= vs[0] * vs[0].dot(w);
        vs[0] += eps * w.normalized();
    } else {
        // m = 1: move the zero itself instead
        std::vector<Complex> zs = x.zeros;
        zs[0] += eps;
        return make_theta_point(zs, vs, m, x.section.lattice);
    }
    return make_theta_point(x.zeros, vs, m, x.section.lattice);
}

TwistedMap<ThetaPoint> mu_theta(int m, const Lattice& lat) {
    TwistedMap<ThetaPoint> map;
    map.name = "theta(m=" + std::to_string(m) + ")";
    map.guard_min = tol::sep_min;
    map.apply_fn = [m, lat](const ThetaPoint& u, const ThetaPoint& v) {
        const ThetaSection h = product_section(u.section, v.section);
        // last factor carries S(f); leading factor carries S(g)
        const auto factors = refactor_with_blocks(h, {v.zeros, u.zeros});
        return std::make_pair(ThetaPoint{factors[0], v.zeros}, ThetaPoint{factors[1], u.zeros});
    };
    map.margin = [m, lat](const ThetaPoint& u, const ThetaPoint& v) -> double {
        if (u.section.n != 1 || v.section.n != 1) return 0.0;
        const double span = cell_span(lat, m);
        double gap = std::numeric_limits<double>::infinity();
        for (const Complex& a : u.zeros)
            for (const Complex& b : v.zeros)
                gap = std::min(gap, torus_distance(a, b, lat, m));
        return gap / span;
    };
    return map;
}

std::vector<ThetaPoint> theta_local_action(const BraidWord& word, std::vector<ThetaPoint> fs) {
    if (fs.empty()) throw Error(ErrorKind::InvalidArgument, "empty section tuple");
    const int m = fs[0].section.m;
    const int N = static_cast<int>(fs.size());
    if (word.n_strands != m * N)
        throw Error(ErrorKind::InvalidArgument, "word strand count must equal m*N");
    for (std::size_t k = 0; k < word.letters.size(); ++k) {
        const int i = word.letters[k];
        if (i < 1 || i >= m * N)
            throw Error(ErrorKind::InvalidArgument, "letter " + std::to_string(i) + " out of range");
        if (i % m != 0) {
            const int fi = (i - 1) / m;
            const int p = i - fi * m;
            auto& zs = fs[static_cast<std::size_t>(fi)].zeros;
            std::swap(zs[static_cast<std::size_t>(p - 1)], zs[static_cast<std::size_t>(p)]);
        } else {
            const int a = i / m;
            ThetaPoint& F = fs[static_cast<std::size_t>(a - 1)];
            ThetaPoint& G = fs[static_cast<std::size_t>(a)];
            std::vector<Complex> A1(F.zeros.begin(), F.zeros.end() - 1);
            A1.push_back(G.zeros.front());
            std::vector<Complex> A2{F.zeros.back()};
            A2.insert(A2.end(), G.zeros.begin() + 1, G.zeros.end());

            const ThetaSection h = product_section(F.section, G.section);
            const auto factors = refactor_with_blocks(h, {A1, A2});
            F = ThetaPoint{factors[0], A1};
            G = ThetaPoint{factors[1], A2};
        }
    }
    return fs;
}

}  // namespace ybfact
