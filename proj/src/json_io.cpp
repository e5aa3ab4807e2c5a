#include "ybfact/json_io.hpp"

namespace ybfact {

Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorKind::InvalidArgument, "complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const ComplexMatrix& a) {
    Json entries = Json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) entries.push_back(to_json(a(i, j)));
    return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const Json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& entries = j.at("entries");
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(entries.size()) != rows * cols)
        throw Error(ErrorKind::InvalidArgument, "matrix entry count does not match rows*cols");
    ComplexMatrix a(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index jc = 0; jc < cols; ++jc) a(i, jc) = complex_from_json(entries[k++]);
    if (!is_finite(a)) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entries");
    return a;
}

Json to_json(const MatrixPolynomial& p) {
    Json coeffs = Json::array();
    for (const auto& a : p.coeffs) coeffs.push_back(to_json(a));
    return Json{{"m", p.m}, {"d", p.d}, {"coeffs", coeffs}};
}

MatrixPolynomial polynomial_from_json(const Json& j) {
    MatrixPolynomial p;
    p.m = j.at("m").get<int>();
    p.d = j.at("d").get<int>();
    if (p.m < 1 || p.d < 1) throw Error(ErrorKind::InvalidArgument, "need m >= 1 and d >= 1");
    for (const auto& cj : j.at("coeffs")) {
        p.coeffs.push_back(matrix_from_json(cj));
        if (p.coeffs.back().rows() != p.m || p.coeffs.back().cols() != p.m)
            throw Error(ErrorKind::InvalidArgument, "coefficient size mismatch");
    }
    if (static_cast<int>(p.coeffs.size()) != p.d)
        throw Error(ErrorKind::InvalidArgument, "coefficient count must equal the degree");
    return p;
}

Json to_json(const Factorization& f) {
    Json factors = Json::array();
    for (const auto& b : f.factors) factors.push_back(to_json(b));
    Json spectra = Json::array();
    for (const auto& s : f.spectra) {
        Json vals = Json::array();
        for (const auto& v : s.values) vals.push_back(to_json(v));
        spectra.push_back(vals);
    }
    return Json{{"m", f.m}, {"d", f.d}, {"factors", factors}, {"spectra", spectra}};
}

Factorization factorization_from_json(const Json& j) {
    Factorization f;
    f.m = j.at("m").get<int>();
    f.d = j.at("d").get<int>();
    if (f.m < 1 || f.d < 1) throw Error(ErrorKind::InvalidArgument, "need m >= 1 and d >= 1");
    for (const auto& bj : j.at("factors")) {
        f.factors.push_back(matrix_from_json(bj));
        if (f.factors.back().rows() != f.m || f.factors.back().cols() != f.m)
            throw Error(ErrorKind::InvalidArgument, "factor size mismatch");
    }
    if (static_cast<int>(f.factors.size()) != f.d)
        throw Error(ErrorKind::InvalidArgument, "factor count must equal d");
    if (j.contains("spectra")) {
        for (const auto& sj : j.at("spectra")) {
            std::vector<Complex> vals;
            for (const auto& vj : sj) vals.push_back(complex_from_json(vj));
            f.spectra.push_back(make_ordered_spectrum(std::move(vals)));
        }
        if (f.spectra.size() != f.factors.size())
            throw Error(ErrorKind::InvalidArgument, "spectra count must equal d");
    } else {
        f = make_factorization(f.m, std::move(f.factors));
    }
    return f;
}

Json to_json(const SpectrumPartition& p) {
    Json blocks = Json::array();
    for (const auto& b : p.blocks) {
        Json vals = Json::array();
        for (const auto& v : b) vals.push_back(to_json(v));
        blocks.push_back(vals);
    }
    return Json{{"blocks", blocks}};
}

SpectrumPartition partition_from_json(const Json& j) {
    SpectrumPartition p;
    for (const auto& bj : j.at("blocks")) {
        std::vector<Complex> block;
        for (const auto& vj : bj) block.push_back(complex_from_json(vj));
        p.blocks.push_back(std::move(block));
    }
    return p;
}

Json to_json(const ThetaSection& s) {
    Json coeffs = Json::array();
    for (const auto& a : s.coeffs) coeffs.push_back(to_json(a));
    return Json{{"n", s.n},
                {"m", s.m},
                {"c", to_json(s.c)},
                {"tau", to_json(s.lattice.tau)},
                {"coeffs", coeffs}};
}

ThetaSection section_from_json(const Json& j) {
    ThetaSection s;
    s.n = j.at("n").get<int>();
    s.m = j.at("m").get<int>();
    if (s.n < 1 || s.m < 1) throw Error(ErrorKind::InvalidArgument, "need n >= 1 and m >= 1");
    s.c = complex_from_json(j.at("c"));
    s.lattice = make_lattice(complex_from_json(j.at("tau")));
    s.c1 = double(s.m) * s.c + s.lattice.tau * (s.m * s.n * (1.0 - s.m) / 2.0);
    for (const auto& cj : j.at("coeffs")) {
        s.coeffs.push_back(matrix_from_json(cj));
        if (s.coeffs.back().rows() != s.m || s.coeffs.back().cols() != s.m)
            throw Error(ErrorKind::InvalidArgument, "coefficient size mismatch");
    }
    if (static_cast<int>(s.coeffs.size()) != s.m * s.m * s.n)
        throw Error(ErrorKind::InvalidArgument, "coefficient count must equal m^2 n");
    return s;
}

Json to_json(const ZeroSet& z) {
    Json points = Json::array();
    for (const auto& p : z.points) points.push_back(to_json(p));
    return Json{{"points", points}};
}

ZeroSet zeroset_from_json(const Json& j) {
    ZeroSet z;
    for (const auto& pj : j.at("points")) z.points.push_back(complex_from_json(pj));
    return z;
}

Json to_json(const ThetaPoint& p) {
    Json zeros = Json::array();
    for (const auto& z : p.zeros) zeros.push_back(to_json(z));
    return Json{{"section", to_json(p.section)}, {"zeros", zeros}};
}

ThetaPoint theta_point_from_json(const Json& j) {
    ThetaPoint p;
    p.section = section_from_json(j.at("section"));
    for (const auto& zj : j.at("zeros")) p.zeros.push_back(complex_from_json(zj));
    if (static_cast<int>(p.zeros.size()) != p.section.m * p.section.n)
        throw Error(ErrorKind::InvalidArgument, "zero count must equal m*n");
    return p;
}

Json to_json(const RelationReport& r) {
    return Json{{"map", r.map_name},      {"n_triples", r.n_triples},
                {"rejected", r.rejected}, {"max_residuals", r.max_residuals},
                {"pass", r.pass},         {"seed", r.seed}};
}

}  // namespace ybfact
