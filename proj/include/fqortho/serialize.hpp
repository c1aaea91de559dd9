#pragma once

#include <json.hpp>

#include <string>

#include "fqortho/geometry.hpp"
#include "fqortho/matrix.hpp"
#include "fqortho/omega.hpp"
#include "fqortho/tables.hpp"

namespace fqo {

using Json = nlohmann::ordered_json;

// Insertion-ordered keys, doubles at 17 significant digits, non-finite doubles as null.
std::string canonical_dump(const Json& j, int indent = 2);
Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);

// "num/den"; reading also accepts integers and decimal strings.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

// {"n": n, "d": d, "matrices": [[row-major d*d doubles], ...]}
Json matrix_tuple_to_json(const MatrixTuple& a);
MatrixTuple matrix_tuple_from_json(const Json& j);
Json matrix_to_json(const DenseMatrix& m);  // flat row-major
DenseMatrix matrix_from_json(const Json& j, int d);

// {"r": [[j, "iota bits"], ...], "q": "kappa bits"}
Json word_to_json(int n, const std::vector<int>& letters, unsigned kappa);
std::pair<std::vector<int>, unsigned> word_from_json(int n, const Json& j);

// {"n", "cap", "terms": [{"word", "c"}]}
Json formal_to_json(const FormalElement& x);
FormalElement formal_from_json(const Json& j);

// {"n", "max_r", "entries": [{"k", "word", "c"}]}
Json table_to_json(const RationalTable& t);
RationalTable table_from_json(const Json& j);
Json pmatrices_to_json(const PMatrices& p);

// {"n", "omega": [{"j", "iota", "c"}]}; zero entries are omitted on output, loading checks that omega_j^iota vanishes when iota_j = 0 and that each nonzero type sums to 1.
Json connection_to_json(const ConnectionData& w);
ConnectionData connection_from_json(const Json& j);

// {"n", "coeffs": [{"k", "word", "c"}]}; inadmissible indices are rejected.
Json operation_data_to_json(const OperationData& p);
OperationData operation_data_from_json(const Json& j);
// {"n", "coeffs": [{"r": [[j, "iota bits"], ...], "c"}]}
Json orthogonalization_data_to_json(const OrthogonalizationData& p);
OrthogonalizationData orthogonalization_data_from_json(const Json& j);

// {"n", "degree", "perturbation": {"entries": [{"k", "word", "c"}]}}: A_k = Q_k + sum c word Q_k.
Tuple<FormalElement> formal_input_from_json(const Json& j);

}  // namespace fqo
