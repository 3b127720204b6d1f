#pragma once

#include <json.hpp>

#include "gitpol/polarization.hpp"
#include "gitpol/setting.hpp"

namespace gitpol {

using Json = nlohmann::json;

// Rationals travel as strings "p/q" or "p"; plain JSON integers are accepted on input.
Json to_json(const Rational& x);
Rational rational_from_json(const Json& j, const std::string& where);
Json to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& where);
Json to_json(const RatMatrix& m);
RatMatrix matrix_from_json(const Json& j, const std::string& where);

// {"ambient_dim", "left_twists", "left_mults", "right_twists", "right_mults"}; validated on input.
Json to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const Json& j);

// {"lambda": [...], "mu": [...]}.
Json to_json(const Polarization& pol);
Polarization polarization_from_json(const Json& j);

// {"blocks": [[ block(l=0,i=0), block(0,1), ... ], ...]} with each block an n_l × m_i array of
// polynomial strings in x0..xn.
Json morphism_to_json(const MorphismElement& w);
MorphismElement morphism_from_json(SystemPtr sys, const Json& j);

Json dimension_vector_to_json(const DimensionVector& d);
DimensionVector dimension_vector_from_json(const Json& j);

// Reads a whole file; throws SchemaError when missing or malformed.
Json read_json_file(const std::string& path);

}  // namespace gitpol
