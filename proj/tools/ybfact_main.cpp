// Command-line driver: randomized verification campaigns for the twisted
// transpositions, single-instance factorizations, theta-space diagnostics,
// and twisted R-matrix checks. All reports are JSON with the fully resolved
// configuration embedded; identical config + seed give byte-identical output.
//
// Exit codes: 0 = all checks passed, 1 = a mathematical check failed or a
// typed math error was raised, 2 = configuration or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ybfact/json_io.hpp"
#include "ybfact/polyfactor.hpp"
#include "ybfact/rmatrix.hpp"
#include "ybfact/sampling.hpp"
#include "ybfact/theta.hpp"
#include "ybfact/twisted_map.hpp"

using namespace ybfact;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitMathFail = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
    std::uint64_t seed = 12345;
    std::size_t trials = 25;
    double tol = 1e-8;
    int m = 2;
    int n = 1;
    int d = 2;
    int N = 3;
    double tau_re = 0.0;
    double tau_im = 1.0;
    std::string in_path;
    std::string out_path;
    bool allow_large = false;

    Complex tau() const { return {tau_re, tau_im}; }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "campaign seed");
    cmd->add_option("--trials", o.trials, "number of sampled trials");
    cmd->add_option("--tol", o.tol, "pass/fail tolerance");
    cmd->add_option("--m", o.m, "matrix size");
    cmd->add_option("--n", o.n, "theta degree");
    cmd->add_option("--d", o.d, "polynomial degree");
    cmd->add_option("--N", o.N, "tuple length");
    cmd->add_option("--tau-re", o.tau_re, "Re(tau)");
    cmd->add_option("--tau-im", o.tau_im, "Im(tau)");
    cmd->add_option("--in", o.in_path, "input JSON file");
    cmd->add_option("--out", o.out_path, "output JSON file (default: stdout)");
    cmd->add_flag("--allow-large", o.allow_large, "lift the desk-scale size guard");
}

void check_desk_scale(const CommonOpts& o) {
    if (o.allow_large) return;
    if (o.m > 4 || o.d > 4 || o.N > 4 || o.n > 2)
        throw Error(ErrorKind::InvalidArgument,
                    "sizes beyond desk scale (m<=4, d<=4, N<=4, n<=2); pass --allow-large");
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open output file " + out_path);
        f << j.dump(2) << "\n";
    }
}

Json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open input file " + path);
    return Json::parse(f);
}

Json merge_reports(const RelationReport& a, const RelationReport& b) {
    RelationReport merged = a;
    for (const auto& [k, v] : b.max_residuals) merged.max_residuals[k] = v;
    merged.pass = a.pass && b.pass;
    merged.rejected = a.rejected + b.rejected;
    return to_json(merged);
}

template <class T, class Drawer>
int run_verify_map(const TwistedMap<T>& map, Drawer draw, const CommonOpts& o, Json config,
                   double campaign_margin) {
    auto campaign = sample_triples(map, draw, o.trials, o.seed, campaign_margin);
    auto rel = check_relations(map, campaign.triples, o.tol);
    auto fun = check_functional_equations(map, campaign.triples, o.tol);
    rel.seed = fun.seed = o.seed;
    rel.rejected += campaign.rejected;
    Json rep = merge_reports(rel, fun);
    rep["config"] = std::move(config);
    emit(rep, o.out_path);
    return rep["pass"].get<bool>() ? kExitPass : kExitMathFail;
}

int cmd_verify_map(const std::string& map_name, const CommonOpts& o) {
    if (o.trials < 1)
        throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
    check_desk_scale(o);
    Json config{{"command", "verify-map"}, {"map", map_name},   {"seed", o.seed},
                {"trials", o.trials},      {"tol", o.tol},      {"m", o.m},
                {"tau", to_json(o.tau())}, {"allow_large", o.allow_large}};

    if (map_name == "scalar") {
        return run_verify_map(
            make_scalar_rational(), [](Rng& r) { return r.complex_square(); }, o, config, 2e-2);
    }
    if (map_name == "qtwist") {
        auto map = make_qtwist<Complex>([](const Complex& z) { return z + 1.0; },
                                        [](const Complex& z) { return z - 1.0; }, "qtwist(z+1)");
        return run_verify_map(map, [](Rng& r) { return r.complex_square(); }, o, config, 0.0);
    }
    if (map_name == "algebra") {
        return run_verify_map(
            make_algebra_map(o.m), [m = o.m](Rng& r) { return r.matrix(m, m); }, o, config, 2e-2);
    }
    if (map_name == "matrix-swap") {
        return run_verify_map(
            mu_matrix(o.m), [m = o.m](Rng& r) { return r.matrix(m, m); }, o, config, 2e-2);
    }
    if (map_name == "theta") {
        const Lattice lat = make_lattice(o.tau());
        auto draw = [m = o.m, lat](Rng& r) {
            std::vector<Complex> zeros;
            for (int attempt = 0; attempt < 256 && static_cast<int>(zeros.size()) < m; ++attempt) {
                const Complex z =
                    (r.uniform(0.05, 0.95) + r.uniform(0.05, 0.95) * lat.tau) / double(m);
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
        return run_verify_map(mu_theta(o.m, lat), draw, o, config, 5e-2);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown map " + map_name);
}

int cmd_factor_poly(const CommonOpts& o, const std::string& partition_path) {
    if (o.in_path.empty() || partition_path.empty())
        throw Error(ErrorKind::InvalidArgument, "factor-poly needs --in and --partition");
    const MatrixPolynomial P = polynomial_from_json(load_json(o.in_path));
    const SpectrumPartition part = partition_from_json(load_json(partition_path));
    CommonOpts shape = o;
    shape.m = P.m;
    shape.d = P.d;
    check_desk_scale(shape);

    Json config{{"command", "factor-poly"}, {"in", o.in_path}, {"partition", partition_path},
                {"tol", o.tol},             {"m", P.m},        {"d", P.d}};
    try {
        const Factorization f = refactor(P, part);
        const MatrixPolynomial back = expand_factors(f);
        double scale = 1.0, resid = 0.0;
        for (const auto& a : P.coeffs) scale = std::max(scale, a.norm());
        for (int k = 0; k < P.d; ++k)
            resid = std::max(resid, (back.coeffs[k] - P.coeffs[k]).norm() / scale);
        Json rep{{"config", config},
                 {"factorization", to_json(f)},
                 {"residual", resid},
                 {"pass", resid <= o.tol}};
        emit(rep, o.out_path);
        return resid <= o.tol ? kExitPass : kExitMathFail;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::PartitionMismatch || e.kind() == ErrorKind::DegenerateInstance ||
            e.kind() == ErrorKind::DegenerateSpectrum) {
            std::cerr << e.what() << "\n";
            return kExitMathFail;
        }
        throw;
    }
}

std::vector<int> parse_word(const std::string& text) {
    std::vector<int> letters;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        letters.push_back(std::stoi(item));
    }
    return letters;
}

int cmd_braid_orbit(const CommonOpts& o, const std::string& carrier, const std::string& word_text,
                    int agree_letter) {
    if (o.in_path.empty()) throw Error(ErrorKind::InvalidArgument, "braid-orbit needs --in");
    const Json input = load_json(o.in_path);

    if (carrier == "poly") {
        const Factorization f = factorization_from_json(input);
        CommonOpts shape = o;
        shape.m = f.m;
        shape.N = f.d;
        shape.d = f.d;
        check_desk_scale(shape);
        const int strands = f.m * f.d;
        Json config{{"command", "braid-orbit"}, {"carrier", carrier}, {"in", o.in_path},
                    {"tol", o.tol},             {"m", f.m},           {"N", f.d}};

        if (agree_letter > 0) {
            const int i = agree_letter;
            if (i + 1 >= strands)
                throw Error(ErrorKind::InvalidArgument, "agree letter out of range");
            const Factorization g1 = local_action(BraidWord{strands, {i, i + 1, i}}, f);
            const Factorization g2 = local_action(BraidWord{strands, {i + 1, i, i + 1}}, f);
            double gap = 0.0;
            for (int k = 0; k < f.d; ++k)
                gap = std::max(gap, (g1.factors[k] - g2.factors[k]).norm());
            Json rep{{"config", config}, {"agree_letter", i}, {"gap", gap}, {"pass", gap <= o.tol}};
            emit(rep, o.out_path);
            return gap <= o.tol ? kExitPass : kExitMathFail;
        }

        BraidWord word{strands, parse_word(word_text)};
        const Factorization out = local_action(word, f);
        const MatrixPolynomial before = expand_factors(f), after = expand_factors(out);
        double scale = 1.0, resid = 0.0;
        for (const auto& a : before.coeffs) scale = std::max(scale, a.norm());
        for (int k = 0; k < before.d; ++k)
            resid = std::max(resid, (after.coeffs[k] - before.coeffs[k]).norm() / scale);
        Json rep{{"config", config},
                 {"factorization", to_json(out)},
                 {"product_residual", resid},
                 {"pass", resid <= o.tol}};
        emit(rep, o.out_path);
        return resid <= o.tol ? kExitPass : kExitMathFail;
    }

    if (carrier == "theta") {
        std::vector<ThetaPoint> fs;
        for (const auto& pj : input.at("points")) fs.push_back(theta_point_from_json(pj));
        if (fs.empty()) throw Error(ErrorKind::InvalidArgument, "empty theta tuple");
        const int m = fs[0].section.m;
        const int N = static_cast<int>(fs.size());
        CommonOpts shape = o;
        shape.m = m;
        shape.N = N;
        check_desk_scale(shape);
        const int strands = m * N;
        const Lattice lat = fs[0].section.lattice;
        Json config{{"command", "braid-orbit"}, {"carrier", carrier}, {"in", o.in_path},
                    {"tol", o.tol},             {"m", m},             {"N", N}};

        BraidWord word{strands, parse_word(word_text)};
        const std::vector<ThetaPoint> out = theta_local_action(word, fs);
        // product preservation at sample points, up to one global scalar
        Complex num = 0.0;
        double den = 0.0;
        std::vector<ComplexMatrix> before, after;
        for (int k = 0; k < 6; ++k) {
            const Complex z = (0.11 + 0.13 * k + (0.17 + 0.09 * k) * lat.tau) / double(m);
            ComplexMatrix pb = ComplexMatrix::Identity(m, m), pa = pb;
            for (const auto& p : fs) pb *= mtheta_eval(p.section, z);
            for (const auto& p : out) pa *= mtheta_eval(p.section, z);
            before.push_back(pb);
            after.push_back(pa);
            num += (pa.conjugate().cwiseProduct(pb)).sum();
            den += pa.squaredNorm();
        }
        const Complex s = num / den;
        double resid = 0.0;
        for (std::size_t k = 0; k < before.size(); ++k)
            resid = std::max(resid, (before[k] - s * after[k]).norm() / (1.0 + before[k].norm()));
        Json points = Json::array();
        for (const auto& p : out) points.push_back(to_json(p));
        Json rep{{"config", config},
                 {"points", points},
                 {"product_residual", resid},
                 {"pass", resid <= o.tol}};
        emit(rep, o.out_path);
        return resid <= o.tol ? kExitPass : kExitMathFail;
    }

    throw Error(ErrorKind::InvalidArgument, "carrier must be poly or theta");
}

int cmd_theta_diag(const CommonOpts& o, double c_re, double c_im) {
    if (o.trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
    check_desk_scale(o);
    const Lattice lat = make_lattice(o.tau());
    const Complex c{c_re, c_im};
    const int m = o.m, n = o.n;
    Json config{{"command", "theta-diag"}, {"m", m},         {"n", n},
                {"c", to_json(c)},         {"tau", to_json(lat.tau)}, {"seed", o.seed},
                {"trials", o.trials},      {"allow_large", o.allow_large}};

    Json checks = Json::object();
    bool all_pass = true;

    // dimension of the constrained section space
    std::vector<ThetaSection> basis;
    try {
        basis = mtheta_basis(n, m, c, lat);
        checks["dimension"] = {{"computed", basis.size()}, {"expected", m * m * n}, {"pass", true}};
    } catch (const Error& e) {
        checks["dimension"] = {{"error", e.what()}, {"expected", m * m * n}, {"pass", false}};
        all_pass = false;
    }

    // zero count and sum-rule congruence for random sections
    if (!basis.empty()) {
        Json zero_checks = Json::array();
        for (std::size_t t = 0; t < o.trials; ++t) {
            Rng rng(o.seed, t);
            ThetaSection f = basis[0];
            for (auto& mat : f.coeffs) mat.setZero();
            for (const auto& b : basis) {
                const Complex w = rng.complex_square();
                for (std::size_t a = 0; a < f.coeffs.size(); ++a) f.coeffs[a] += w * b.coeffs[a];
            }
            f = normalize_section(std::move(f));
            Json entry;
            try {
                const ZeroSet zs = det_zeros(f);
                const double resid = sum_rule_residual(zs, f);
                const bool ok = static_cast<int>(zs.points.size()) == m * n && resid <= 1e-6;
                entry = {{"count", zs.points.size()},
                         {"sum_rule_residual", resid},
                         {"pass", ok}};
                all_pass = all_pass && ok;
            } catch (const Error& e) {
                entry = {{"error", e.what()}, {"pass", false}};
                all_pass = false;
            }
            zero_checks.push_back(entry);
        }
        checks["zeros"] = zero_checks;
    }

    // product-refactor round trip at degree 1 x degree 1
    try {
        auto draw_point = [&](int salt) {
            Rng r(o.seed, (1u << 20) + salt);
            std::vector<Complex> zeros;
            int guard = 0;
            while (static_cast<int>(zeros.size()) < m && guard++ < 256) {
                const Complex z = (r.uniform(0.08, 0.92) + r.uniform(0.08, 0.92) * lat.tau) / double(m);
                bool ok = true;
                for (const Complex& w : zeros)
                    if (torus_distance(z, w, lat, m) < 0.08 / m) ok = false;
                if (ok) zeros.push_back(z);
            }
            std::vector<ComplexVector> vs;
            for (int k = 0; k < m; ++k) vs.push_back(r.vector(m).normalized());
            return make_theta_point(zeros, vs, m, lat);
        };
        ThetaPoint f1 = draw_point(1);
        ThetaPoint f2 = draw_point(2);
        // the two zero sets must stay apart for a generic product
        double gap = 1e9;
        for (const auto& a : f1.zeros)
            for (const auto& b : f2.zeros) gap = std::min(gap, torus_distance(a, b, lat, m));
        if (gap < 0.02 / m) throw Error(ErrorKind::DegenerateInstance, "sampled zero sets collide");
        const ThetaSection h = product_section(f1.section, f2.section);
        const auto roundtrip = theta_refactor(h, SpectrumPartition{{f1.zeros, f2.zeros}});
        const double d1 = section_distance(roundtrip[0], f1.section);
        const double d2 = section_distance(roundtrip[1], f2.section);
        const bool ok = d1 <= 1e-6 && d2 <= 1e-6;
        checks["product_refactor"] = {{"factor1_distance", d1}, {"factor2_distance", d2}, {"pass", ok}};
        all_pass = all_pass && ok;
    } catch (const Error& e) {
        checks["product_refactor"] = {{"error", e.what()}, {"pass", false}};
        all_pass = false;
    }

    Json rep{{"config", config}, {"checks", checks}, {"pass", all_pass}};
    emit(rep, o.out_path);
    return all_pass ? kExitPass : kExitMathFail;
}

int cmd_verify_rmatrix(const CommonOpts& o, const std::string& rkind, const std::string& map_name,
                       int fiber_dim) {
    if (o.trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
    check_desk_scale(o);
    Json config{{"command", "verify-rmatrix"}, {"rmatrix", rkind}, {"map", map_name},
                {"dim", fiber_dim},            {"seed", o.seed},   {"trials", o.trials},
                {"tol", o.tol}};

    auto run = [&]<class T>(TwistedMap<T> map, auto draw, double margin) {
        TwistedRMatrix<T> R = rkind == "keep" ? make_trivial_keep<T>(fiber_dim)
                                              : make_trivial_flip<T>(fiber_dim);
        auto campaign = sample_triples(map, draw, o.trials, o.seed, margin);
        std::vector<std::array<T, 2>> pairs;
        for (const auto& t : campaign.triples) pairs.push_back({t[0], t[1]});
        auto inv = check_inverse(R, map, pairs, o.tol);
        auto ybr = check_twisted_ybr(R, map, campaign.triples, o.tol);
        inv.seed = ybr.seed = o.seed;
        inv.rejected += campaign.rejected;
        Json rep = merge_reports(inv, ybr);
        rep["config"] = config;
        emit(rep, o.out_path);
        return rep["pass"].get<bool>() ? kExitPass : kExitMathFail;
    };

    if (rkind != "keep" && rkind != "flip")
        throw Error(ErrorKind::InvalidArgument, "rmatrix must be keep or flip");
    if (map_name == "scalar")
        return run(make_scalar_rational(), [](Rng& r) { return r.complex_square(); }, 2e-2);
    if (map_name == "matrix-swap")
        return run(mu_matrix(o.m), [m = o.m](Rng& r) { return r.matrix(m, m); }, 2e-2);
    throw Error(ErrorKind::InvalidArgument, "map must be scalar or matrix-swap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twisted transpositions from matrix polynomial and theta factorizations"};
    app.require_subcommand(1);

    CommonOpts o;

    std::string map_name = "scalar";
    auto* verify = app.add_subcommand("verify-map", "relation checks for a shipped map");
    add_common(verify, o);
    verify->add_option("--map", map_name, "scalar|qtwist|algebra|matrix-swap|theta");

    std::string partition_path;
    auto* factor = app.add_subcommand("factor-poly", "refactor a matrix polynomial");
    add_common(factor, o);
    factor->add_option("--partition", partition_path, "partition JSON file");

    std::string carrier = "poly", word_text;
    int agree_letter = 0;
    auto* braid = app.add_subcommand("braid-orbit", "apply a braid word to a factorization");
    add_common(braid, o);
    braid->add_option("--carrier", carrier, "poly|theta");
    braid->add_option("--word", word_text, "comma-separated letters, e.g. 2,1,3,2");
    braid->add_option("--agree", agree_letter, "compare words [i,i+1,i] and [i+1,i,i+1]");

    double c_re = 0.0, c_im = 0.0;
    auto* diag = app.add_subcommand("theta-diag", "theta space diagnostics");
    add_common(diag, o);
    diag->add_option("--c-re", c_re, "Re(c)");
    diag->add_option("--c-im", c_im, "Im(c)");

    std::string rkind = "keep", rmap = "scalar";
    int fiber_dim = 2;
    auto* rmat = app.add_subcommand("verify-rmatrix", "twisted R-matrix checks");
    add_common(rmat, o);
    rmat->add_option("--rmatrix", rkind, "keep|flip");
    rmat->add_option("--map", rmap, "scalar|matrix-swap");
    rmat->add_option("--dim", fiber_dim, "fiber dimension of V");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand(verify)) return cmd_verify_map(map_name, o);
        if (app.got_subcommand(factor)) return cmd_factor_poly(o, partition_path);
        if (app.got_subcommand(braid)) return cmd_braid_orbit(o, carrier, word_text, agree_letter);
        if (app.got_subcommand(diag)) return cmd_theta_diag(o, c_re, c_im);
        if (app.got_subcommand(rmat)) return cmd_verify_rmatrix(o, rkind, rmap, fiber_dim);
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidArgument ? kExitConfig : kExitMathFail;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
