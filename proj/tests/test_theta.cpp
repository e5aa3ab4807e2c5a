#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "ybfact/sampling.hpp"
#include "ybfact/theta.hpp"

#include "oracles.hpp"

using namespace ybfact;

namespace {

const Complex kTwoPiI{0.0, 2.0 * std::numbers::pi};

ThetaSection random_section(const std::vector<ThetaSection>& basis, std::uint64_t seed) {
    Rng rng(seed, 0);
    ThetaSection f = basis[0];
    for (auto& mat : f.coeffs) mat.setZero();
    for (const auto& b : basis) {
        const Complex w = rng.complex_square();
        for (std::size_t a = 0; a < f.coeffs.size(); ++a) f.coeffs[a] += w * b.coeffs[a];
    }
    return normalize_section(std::move(f));
}

ThetaPoint random_theta_point(int m, const Lattice& lat, std::uint64_t seed, std::uint64_t salt) {
    Rng r(seed, salt);
    std::vector<Complex> zeros;
    int guard = 0;
    while (static_cast<int>(zeros.size()) < m && guard++ < 512) {
        const Complex z = (r.uniform(0.05, 0.95) + r.uniform(0.05, 0.95) * lat.tau) / double(m);
        bool ok = true;
        for (const Complex& w : zeros)
            if (torus_distance(z, w, lat, m) < 0.08 / m) ok = false;
        if (ok) zeros.push_back(z);
    }
    REQUIRE(static_cast<int>(zeros.size()) == m);
    std::vector<ComplexVector> vs;
    for (int k = 0; k < m; ++k) vs.push_back(r.vector(m).normalized());
    return make_theta_point(zeros, vs, m, lat);
}

auto theta_drawer(int m, const Lattice& lat) {
    return [m, lat](Rng& r) {
        std::vector<Complex> zeros;
        int guard = 0;
        while (static_cast<int>(zeros.size()) < m && guard++ < 512) {
            const Complex z = (r.uniform(0.05, 0.95) + r.uniform(0.05, 0.95) * lat.tau) / double(m);
            bool ok = true;
            for (const Complex& w : zeros)
                if (torus_distance(z, w, lat, m) < 0.08 / m) ok = false;
            if (ok) zeros.push_back(z);
        }
        if (static_cast<int>(zeros.size()) < m)
            throw Error(ErrorKind::DegenerateInstance, "zero sampling failed");
        std::vector<ComplexVector> vs;
        for (int k = 0; k < m; ++k) vs.push_back(r.vector(m).normalized());
        return make_theta_point(zeros, vs, m, lat);
    };
}

}  // namespace

TEST_CASE("heisenberg pair satisfies its defining relations exactly") {
    for (int m : {1, 2, 3, 4}) {
        const auto h = heisenberg_pair(m);
        const ComplexMatrix I = ComplexMatrix::Identity(m, m);
        ComplexMatrix p1 = I, p2 = I;
        for (int k = 0; k < m; ++k) {
            p1 *= h.gamma1;
            p2 *= h.gamma2;
        }
        CHECK((p1 - I).norm() < 1e-14);
        CHECK((p2 - I).norm() == 0.0);  // permutation matrix, exact
        CHECK((h.gamma2 * h.gamma1 - h.epsilon * h.gamma1 * h.gamma2).norm() < 1e-14);
        CHECK(std::abs(std::pow(h.epsilon, m) - 1.0) < 1e-13);
    }
}

TEST_CASE("scalar theta basis satisfies both transformation laws") {
    for (const Complex tau : {Complex(0, 1), Complex(0.3, 0.8)}) {
        const Lattice lat = make_lattice(tau);
        for (int n : {1, 2, 3, 4}) {
            const Complex c{0.13, -0.21};
            Rng rng(5, static_cast<std::uint64_t>(n));
            for (int t = 0; t < 20; ++t) {
                const Complex z{rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)};
                const auto th = theta_basis_eval_all(n, c, lat, z);
                for (int a = 0; a < n; ++a) {
                    const Complex lhs1 = theta_basis_eval(n, c, lat, a, z + 1.0 / n);
                    const Complex rhs1 = std::exp(kTwoPiI * double(a) / double(n)) * th[a];
                    CHECK(std::abs(lhs1 - rhs1) / (1.0 + std::abs(rhs1)) < tol::series_tol);

                    const Complex lhs2 = theta_basis_eval(n, c, lat, a, z + tau / double(n));
                    const Complex rhs2 =
                        std::exp(-kTwoPiI * (z - (n - 1.0) / (2.0 * n) * tau - c / double(n))) *
                        th[(a + 1) % n];
                    CHECK(std::abs(lhs2 - rhs2) / (1.0 + std::abs(rhs2)) < tol::series_tol);
                }
            }
        }
    }
}

TEST_CASE("the order-1 theta has exactly one zero in the fundamental cell") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    const Complex c{0.07, 0.11};
    auto g = [&](Complex z) { return theta_basis_eval(1, c, lat, 0, z); };
    // offset base point so no zero sits on the contour
    const int count = oracle::winding_zero_count(g, Complex(0.013, 0.017), 1.0, lat.tau);
    CHECK(count == 1);
}

TEST_CASE("matrix theta space has dimension m^2 n") {
    for (const Complex tau : {Complex(0, 1), Complex(0.3, 0.8)}) {
        const Lattice lat = make_lattice(tau);
        for (auto [m, n] :
             std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {3, 2}}) {
            const auto basis = mtheta_basis(n, m, Complex(0.13, 0.21), lat);
            CHECK(static_cast<int>(basis.size()) == m * m * n);
        }
    }
}

TEST_CASE("sections satisfy both lines of the quasi-periodicity conditions") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    const auto h = heisenberg_pair(2);
    for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}}) {
        const Complex c{-0.05, 0.17};
        const auto basis = mtheta_basis(n, m, c, lat);
        const ThetaSection f = random_section(basis, 20 + static_cast<std::uint64_t>(n));
        Rng rng(21, static_cast<std::uint64_t>(n));
        for (int t = 0; t < 20; ++t) {
            const Complex z{rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3)};
            const ComplexMatrix fz = mtheta_eval(f, z);
            const ComplexMatrix lhs1 = mtheta_eval(f, z + 1.0 / m);
            const ComplexMatrix rhs1 = h.gamma1.inverse() * fz * h.gamma1;
            CHECK((lhs1 - rhs1).norm() / (1.0 + rhs1.norm()) < 10 * tol::constraint_tol);

            const ComplexMatrix lhs2 = mtheta_eval(f, z + lat.tau / double(m));
            const ComplexMatrix rhs2 = std::exp(-kTwoPiI * (double(m) * n * z - f.c)) *
                                       h.gamma2.transpose() * fz * h.gamma2;
            CHECK((lhs2 - rhs2).norm() / (1.0 + rhs2.norm()) < 10 * tol::constraint_tol);
        }
    }
}

TEST_CASE("mtheta_eval is linear in the coefficients") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const auto basis = mtheta_basis(1, 2, Complex(0.1, 0.1), lat);
    ThetaSection sum = basis[0];
    for (std::size_t a = 0; a < sum.coeffs.size(); ++a) sum.coeffs[a] += basis[1].coeffs[a];
    const Complex z{0.23, 0.11};
    CHECK((mtheta_eval(sum, z) - mtheta_eval(basis[0], z) - mtheta_eval(basis[1], z)).norm() <
          1e-12);
}

TEST_CASE("normalization is idempotent and fixes the largest entry to one") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    const auto basis = mtheta_basis(1, 2, Complex(0.0, 0.0), lat);
    ThetaSection f = random_section(basis, 33);
    for (auto& mat : f.coeffs) mat *= Complex(3.7, -1.2);
    const ThetaSection n1 = normalize_section(f);
    const ThetaSection n2 = normalize_section(n1);
    double best = 0.0;
    for (const auto& mat : n1.coeffs) best = std::max(best, mat.cwiseAbs().maxCoeff());
    CHECK(best == 1.0);
    for (std::size_t a = 0; a < n1.coeffs.size(); ++a)
        CHECK((n1.coeffs[a] - n2.coeffs[a]).norm() == 0.0);
}

TEST_CASE("cell reduction is canonical") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    Rng rng(40, 0);
    for (int t = 0; t < 50; ++t) {
        const Complex z{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Complex r = reduce_to_cell(z, lat, 2);
        CHECK(torus_distance(r, z, lat, 2) < 1e-9);
        CHECK(reduce_to_cell(r, lat, 2) == r);
    }
}

TEST_CASE("det_zeros finds mn zeros, matches the winding oracle and the sum rule") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
        const Complex c{0.13, 0.21};
        const auto basis = mtheta_basis(n, m, c, lat);
        const ThetaSection f = random_section(basis, 50 + static_cast<std::uint64_t>(m + 10 * n));
        const ZeroSet zs = det_zeros(f);
        CHECK(static_cast<int>(zs.points.size()) == m * n);

        // independent count through the argument principle on the (1/m) cell
        auto g = [&](Complex z) { return Complex(mtheta_eval(f, z).determinant()); };
        const int winding = oracle::winding_zero_count(
            g, Complex(0.0131, 0.0097), 1.0 / m, lat.tau / double(m), 800);
        CHECK(winding == m * n);

        CHECK(sum_rule_residual(zs, f) < 1e-6);

        for (const Complex& z : zs.points) {
            CHECK(reduce_to_cell(z, lat, m) == z);
            CHECK(std::abs(g(z)) < tol::zero_tol * (1.0 + std::abs(g(Complex(0.21, 0.13)))));
        }
    }
}

TEST_CASE("interpolation hits the prescribed kernel data") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const int m = 2, n = 1;
    for (int trial = 0; trial < 10; ++trial) {
        Rng rng(70, trial);
        std::vector<Complex> lams;
        while (static_cast<int>(lams.size()) < m * n) {
            const Complex z = (rng.uniform(0.05, 0.95) + rng.uniform(0.05, 0.95) * lat.tau) / double(m);
            bool ok = true;
            for (const Complex& w : lams)
                if (torus_distance(z, w, lat, m) < 0.05) ok = false;
            if (ok) lams.push_back(z);
        }
        std::vector<ComplexVector> vs;
        for (int k = 0; k < m * n; ++k) vs.push_back(rng.vector(m).normalized());

        const ThetaSection f = interpolate(lams, vs, n, m, lat);
        for (int k = 0; k < m * n; ++k) {
            const ComplexMatrix fl = mtheta_eval(f, lams[static_cast<std::size_t>(k)]);
            CHECK((fl * vs[static_cast<std::size_t>(k)]).norm() < 1e-8);
            CHECK(std::abs(Complex(fl.determinant())) < tol::zero_tol);
        }

        // homogeneity: rescaling the kernel vectors changes nothing after the gauge
        std::vector<ComplexVector> vs2;
        for (int k = 0; k < m * n; ++k)
            vs2.push_back(ComplexVector(vs[static_cast<std::size_t>(k)] * Complex(0.3, 1.7)));
        const ThetaSection f2 = interpolate(lams, vs2, n, m, lat);
        CHECK(section_distance(f, f2) < 1e-9);
    }
}

TEST_CASE("interpolated sections return their zeros") {
    const Lattice lat = make_lattice(Complex(0.3, 0.8));
    const ThetaPoint p = random_theta_point(2, lat, 81, 0);
    const ZeroSet zs = det_zeros(p.section);
    REQUIRE(zs.points.size() == p.zeros.size());
    std::vector<Complex> want = p.zeros;
    canonical_sort(want);
    for (std::size_t k = 0; k < want.size(); ++k)
        CHECK(torus_distance(zs.points[k], want[k], lat, 2) < tol::zero_tol);
}

TEST_CASE("theta_refactor round trip at degree one returns the section") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const ThetaPoint p = random_theta_point(2, lat, 82, 0);
    const auto fs = theta_refactor(p.section, SpectrumPartition{{p.zeros}});
    REQUIRE(fs.size() == 1);
    CHECK(section_distance(fs[0], p.section) < 1e-10);
}

TEST_CASE("theta_refactor factors a product of two degree-1 sections") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const int m = 2;
    for (int trial = 0; trial < 3; ++trial) {
        const ThetaPoint f1 = random_theta_point(m, lat, 83, 2 * trial);
        const ThetaPoint f2 = random_theta_point(m, lat, 83, 2 * trial + 1);
        double gap = 1e9;
        for (const auto& a : f1.zeros)
            for (const auto& b : f2.zeros) gap = std::min(gap, torus_distance(a, b, lat, m));
        if (gap < 0.04 / m) continue;

        const ThetaSection h = product_section(f1.section, f2.section);
        const auto fs = theta_refactor(h, SpectrumPartition{{f1.zeros, f2.zeros}});
        REQUIRE(fs.size() == 2);
        CHECK(section_distance(fs[0], f1.section) < 1e-6);
        CHECK(section_distance(fs[1], f2.section) < 1e-6);

        // disjoint zero sets that union to S(h)
        const ZeroSet z1 = det_zeros(fs[0]), z2 = det_zeros(fs[1]);
        for (const auto& a : z1.points)
            for (const auto& b : z2.points) CHECK(torus_distance(a, b, lat, m) > tol::sep_min);
        std::vector<Complex> uni = z1.points;
        uni.insert(uni.end(), z2.points.begin(), z2.points.end());
        canonical_sort(uni);
        const ZeroSet zh = det_zeros(h);
        REQUIRE(zh.points.size() == uni.size());
        for (std::size_t k = 0; k < uni.size(); ++k)
            CHECK(torus_distance(zh.points[k], uni[k], lat, m) < 1e-6);
    }
}

TEST_CASE("mu_theta is an involution and exchanges the zero sets") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const int m = 2;
    const auto map = mu_theta(m, lat);
    const ThetaPoint f = random_theta_point(m, lat, 84, 0);
    const ThetaPoint g = random_theta_point(m, lat, 84, 1);
    REQUIRE(map.margin(f, g) > 5e-2);

    const auto [f1, g1] = apply_mu(map, f, g);
    // zero sets exchanged, verified with the actual zero finder
    const ZeroSet zf1 = det_zeros(f1.section);
    std::vector<Complex> want = g.zeros;
    canonical_sort(want);
    for (std::size_t k = 0; k < want.size(); ++k)
        CHECK(torus_distance(zf1.points[k], want[k], lat, m) < tol::zero_tol);

    const auto [f2, g2] = apply_mu(map, f1, g1);
    CHECK(Carrier<ThetaPoint>::distance(f2, f) < 1e-6);
    CHECK(Carrier<ThetaPoint>::distance(g2, g) < 1e-6);
}

TEST_CASE("mu_theta passes the relation checks") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const auto map = mu_theta(2, lat);
    auto campaign = sample_triples(map, theta_drawer(2, lat), 3, 85, 5e-2);
    const auto rel = check_relations(map, campaign.triples, 1e-6);
    CHECK(rel.pass);
    const auto fun = check_functional_equations(map, campaign.triples, 1e-6);
    CHECK(fun.pass);
}

TEST_CASE("theta local action: interior letters, boundary involution, braid") {
    const Lattice lat = make_lattice(Complex(0, 1));
    const int m = 2, N = 3;
    std::vector<ThetaPoint> fs;
    for (int k = 0; k < N; ++k) fs.push_back(random_theta_point(m, lat, 86, 3 * k + 1));
    // overall genericity: all strand labels distinct
    {
        std::vector<Complex> all;
        for (const auto& p : fs) all.insert(all.end(), p.zeros.begin(), p.zeros.end());
        double gap = 1e9;
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j)
                gap = std::min(gap, torus_distance(all[i], all[j], lat, m));
        REQUIRE(gap > 0.02);
    }

    // interior letter permutes labels and leaves sections alone
    const auto g_int = theta_local_action(BraidWord{6, {1}}, fs);
    CHECK(section_distance(g_int[0].section, fs[0].section) == 0.0);
    CHECK(g_int[0].zeros[0] == fs[0].zeros[1]);
    CHECK(g_int[0].zeros[1] == fs[0].zeros[0]);

    // boundary letter applied twice
    const auto g_bd = theta_local_action(BraidWord{6, {2, 2}}, fs);
    for (int k = 0; k < N; ++k) {
        CHECK(section_distance(g_bd[static_cast<std::size_t>(k)].section,
                               fs[static_cast<std::size_t>(k)].section) < 1e-6);
        for (int j = 0; j < m; ++j)
            CHECK(torus_distance(g_bd[static_cast<std::size_t>(k)].zeros[static_cast<std::size_t>(j)],
                                 fs[static_cast<std::size_t>(k)].zeros[static_cast<std::size_t>(j)],
                                 lat, m) < 1e-9);
    }

    // braid agreement on a mixed interior/boundary pair
    for (int i : {1, 2, 3}) {
        const auto a = theta_local_action(BraidWord{6, {i, i + 1, i}}, fs);
        const auto b = theta_local_action(BraidWord{6, {i + 1, i, i + 1}}, fs);
        for (int k = 0; k < N; ++k)
            CHECK(section_distance(a[static_cast<std::size_t>(k)].section,
                                   b[static_cast<std::size_t>(k)].section) < 1e-5);
    }

    // the product of all sections is preserved up to one global scalar
    const auto moved = theta_local_action(BraidWord{6, {2, 4, 1, 2}}, fs);
    Complex num = 0.0;
    double den = 0.0;
    std::vector<ComplexMatrix> before, after;
    for (int k = 0; k < 6; ++k) {
        const Complex z = (0.1 + 0.12 * k + (0.15 + 0.1 * k) * lat.tau) / double(m);
        ComplexMatrix pb = ComplexMatrix::Identity(m, m), pa = pb;
        for (const auto& p : fs) pb *= mtheta_eval(p.section, z);
        for (const auto& p : moved) pa *= mtheta_eval(p.section, z);
        before.push_back(pb);
        after.push_back(pa);
        num += (pa.conjugate().cwiseProduct(pb)).sum();
        den += pa.squaredNorm();
    }
    const Complex s = num / den;
    for (std::size_t k = 0; k < before.size(); ++k)
        CHECK((before[k] - s * after[k]).norm() / (1.0 + before[k].norm()) < 1e-6);
}

TEST_CASE("lattice guard rejects flat tau") {
    CHECK_THROWS_AS(make_lattice(Complex(0.5, 0.01)), Error);
}
