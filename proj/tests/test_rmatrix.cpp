#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "ybfact/polyfactor.hpp"
#include "ybfact/rmatrix.hpp"
#include "ybfact/sampling.hpp"
#include "ybfact/theta.hpp"

using namespace ybfact;

namespace {

std::vector<std::array<Complex, 3>> scalar_triples(std::size_t k, std::uint64_t seed) {
    return sample_triples(
               make_scalar_rational(), [](Rng& r) { return r.complex_square(); }, k, seed, 2e-2)
        .triples;
}

std::vector<std::array<Complex, 2>> pairs_of(const std::vector<std::array<Complex, 3>>& ts) {
    std::vector<std::array<Complex, 2>> ps;
    for (const auto& t : ts) ps.push_back({t[0], t[1]});
    return ps;
}

}  // namespace

TEST_CASE("trivial keep R-matrix is the identity and passes both checks exactly") {
    const auto R = make_trivial_keep<Complex>(3);
    const ComplexMatrix op = R.evaluate(Complex(0.2), Complex(0.5));
    CHECK((op - ComplexMatrix::Identity(9, 9)).norm() == 0.0);

    const auto map = make_scalar_rational();
    const auto triples = scalar_triples(25, 11);
    const auto inv = check_inverse(R, map, pairs_of(triples), 1e-15);
    CHECK(inv.pass);
    CHECK(inv.max_residuals.at("inverse") == 0.0);
    const auto ybr = check_twisted_ybr(R, map, triples, 1e-15);
    CHECK(ybr.pass);
    CHECK(ybr.max_residuals.at("twisted_ybr") == 0.0);
}

TEST_CASE("trivial flip R-matrix flips the tensor factors") {
    const auto R = make_trivial_flip<Complex>(2);
    const ComplexMatrix P = R.evaluate(Complex(0.1), Complex(0.2));
    ComplexVector e12 = ComplexVector::Zero(4);
    e12(0 * 2 + 1) = 1.0;  // e_1 tensor e_2
    ComplexVector out = P * e12;
    CHECK(std::abs(out(1 * 2 + 0) - 1.0) == 0.0);  // e_2 tensor e_1
    CHECK((P * P - ComplexMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("trivial flip passes both checks against the scalar map") {
    const auto R = make_trivial_flip<Complex>(2);
    const auto map = make_scalar_rational();
    const auto triples = scalar_triples(25, 13);
    CHECK(check_inverse(R, map, pairs_of(triples), 1e-12).pass);
    const auto ybr = check_twisted_ybr(R, map, triples, 1e-12);
    CHECK(ybr.pass);
    CHECK(ybr.max_residuals.at("twisted_ybr") < 1e-12);
}

namespace {

// runs keep and flip against one map's campaign at 1e-12
template <class T, class Drawer>
void check_trivial_pair(const TwistedMap<T>& map, Drawer draw, std::size_t trials,
                        std::uint64_t seed, double margin) {
    auto campaign = sample_triples(map, draw, trials, seed, margin);
    std::vector<std::array<T, 2>> pairs;
    for (const auto& t : campaign.triples) pairs.push_back({t[0], t[1]});
    for (const std::string kind : {"keep", "flip"}) {
        const auto R =
            kind == "keep" ? make_trivial_keep<T>(2) : make_trivial_flip<T>(2);
        CHECK(check_inverse(R, map, pairs, 1e-12).pass);
        CHECK(check_twisted_ybr(R, map, campaign.triples, 1e-12).pass);
    }
}

}  // namespace

TEST_CASE("both trivial R-matrices pass against every shipped map") {
    check_trivial_pair(
        mu_matrix(2), [](Rng& r) { return r.matrix(2, 2); }, 25, 17, 2e-2);
    check_trivial_pair(
        make_algebra_map(2), [](Rng& r) { return r.matrix(2, 2); }, 10, 18, 2e-2);
    check_trivial_pair(
        make_qtwist<Complex>([](const Complex& z) { return z + 1.0; },
                             [](const Complex& z) { return z - 1.0; }, "qtwist"),
        [](Rng& r) { return r.complex_square(); }, 10, 19, 0.0);

    const Lattice lat = make_lattice(Complex(0, 1));
    auto theta_draw = [&lat](Rng& r) {
        std::vector<Complex> zeros;
        int guard = 0;
        while (static_cast<int>(zeros.size()) < 2 && guard++ < 512) {
            const Complex z = (r.uniform(0.05, 0.95) + r.uniform(0.05, 0.95) * lat.tau) / 2.0;
            bool ok = true;
            for (const Complex& w : zeros)
                if (torus_distance(z, w, lat, 2) < 0.04) ok = false;
            if (ok) zeros.push_back(z);
        }
        std::vector<ComplexVector> vs;
        for (int k = 0; k < 2; ++k) vs.push_back(r.vector(2).normalized());
        return make_theta_point(zeros, vs, 2, lat);
    };
    check_trivial_pair(mu_theta(2, lat), theta_draw, 3, 20, 5e-2);
}

TEST_CASE("a scaled R fails the inverse check with the expected residual") {
    const auto R = scale_rmatrix(make_trivial_keep<Complex>(2), 2.0);
    const auto map = make_scalar_rational();
    const auto triples = scalar_triples(10, 19);
    const auto rep = check_inverse(R, map, pairs_of(triples), 1e-12);
    CHECK_FALSE(rep.pass);
    // |4I - I|_F / (1 + |2I|_F) = 6/5 on a 4x4 identity
    CHECK(rep.max_residuals.at("inverse") == doctest::Approx(1.2));
    CHECK(rep.max_residuals.at("inverse") >= 1e-2);
}

TEST_CASE("an asymmetric defect breaks the twisted Yang-Baxter relation") {
    auto R = make_trivial_keep<Complex>(2);
    auto inner = R.evaluate;
    R.evaluate = [inner](const Complex& u, const Complex& v) {
        ComplexMatrix M = inner(u, v);
        M(0, 1) += 0.1;
        M(3, 2) += 0.07;
        return M;
    };
    const auto map = make_scalar_rational();
    const auto triples = scalar_triples(10, 23);
    const auto rep = check_twisted_ybr(R, map, triples, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_residuals.at("twisted_ybr") >= 1e-2);
}

TEST_CASE("operator embedding matches the direct dense construction") {
    const int n = 2;
    Rng rng(29, 0);
    const ComplexMatrix R = rng.matrix(n * n, n * n);
    const ComplexMatrix S = rng.matrix(n * n, n * n);
    const ComplexMatrix I = ComplexMatrix::Identity(n, n);
    const ComplexMatrix prod = kron(R, I) * kron(I, S);

    // direct block formula: M[(i,j,k),(i',j',k')] = sum_j'' R[(i,j),(i',j'')] S[(j'',k),(j',k')]
    ComplexMatrix direct = ComplexMatrix::Zero(n * n * n, n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int j2 = 0; j2 < n; ++j2)
                        for (int k2 = 0; k2 < n; ++k2) {
                            Complex acc = 0.0;
                            for (int jj = 0; jj < n; ++jj)
                                acc += R(i * n + j, i2 * n + jj) * S(jj * n + k, j2 * n + k2);
                            direct(i * n * n + j * n + k, i2 * n * n + j2 * n + k2) = acc;
                        }
    CHECK((prod - direct).norm() < 1e-13);
}

TEST_CASE("parameter-dependent diagonal R exploration harness") {
    // R(u,v) = diag(1, u, v, uv) with the scalar map: the report is computed
    // and recorded; no pass/fail outcome is claimed for this family.
    TwistedRMatrix<Complex> R;
    R.dim = 2;
    R.name = "diag(1,u,v,uv)";
    R.evaluate = [](const Complex& u, const Complex& v) {
        ComplexMatrix M = ComplexMatrix::Zero(4, 4);
        M(0, 0) = 1.0;
        M(1, 1) = u;
        M(2, 2) = v;
        M(3, 3) = u * v;
        return M;
    };
    const auto map = make_scalar_rational();
    const auto triples = scalar_triples(10, 31);
    const auto rep = check_twisted_ybr(R, map, triples, 1e-9);
    CHECK(rep.n_triples == 10);
    CHECK(std::isfinite(rep.max_residuals.at("twisted_ybr")));
}

TEST_CASE("the checker rejects a nondeterministic map") {
    auto map = make_scalar_rational();
    auto counter = std::make_shared<int>(0);
    auto inner = map.apply_fn;
    map.apply_fn = [inner, counter](const Complex& u, const Complex& v) {
        auto out = inner(u, v);
        out.first += 1e-3 * (++*counter);
        return out;
    };
    const auto R = make_trivial_keep<Complex>(2);
    const auto triples = scalar_triples(3, 37);
    CHECK_THROWS_AS(check_twisted_ybr(R, map, triples, 1e-9), Error);
}
