#pragma once

#include <string>

#include <json.hpp>

#include "ybfact/linalg.hpp"
#include "ybfact/polyfactor.hpp"
#include "ybfact/theta.hpp"
#include "ybfact/twisted_map.hpp"

namespace ybfact {

using Json = nlohmann::json;

// Complex scalars are [re, im] pairs throughout; matrices are
// {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major.

Json to_json(const Complex& z);
Complex complex_from_json(const Json& j);

Json to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const MatrixPolynomial& p);
MatrixPolynomial polynomial_from_json(const Json& j);

Json to_json(const Factorization& f);
Factorization factorization_from_json(const Json& j);

Json to_json(const SpectrumPartition& p);
SpectrumPartition partition_from_json(const Json& j);

Json to_json(const ThetaSection& s);
ThetaSection section_from_json(const Json& j);

Json to_json(const ZeroSet& z);
ZeroSet zeroset_from_json(const Json& j);

Json to_json(const ThetaPoint& p);
ThetaPoint theta_point_from_json(const Json& j);

Json to_json(const RelationReport& r);

}  // namespace ybfact
