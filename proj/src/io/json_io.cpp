#include "gitpol/json_io.hpp"

#include <fstream>
#include <sstream>

#include "gitpol/errors.hpp"

namespace gitpol {

Json to_json(const Rational& x) { return to_string(x); }

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const SchemaError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw SchemaError(where + ": expected a rational string");
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

Vec vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  Vec out;
  for (size_t k = 0; k < j.size(); ++k) out.push_back(rational_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Json to_json(const RatMatrix& m) {
  Json out = Json::array();
  for (size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
  return out;
}

RatMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of rows");
  std::vector<Vec> rows;
  size_t cols = 0;
  for (size_t k = 0; k < j.size(); ++k) {
    rows.push_back(vec_from_json(j[k], where + "[" + std::to_string(k) + "]"));
    if (k == 0) cols = rows.back().size();
    if (rows.back().size() != cols) throw SchemaError(where + ": ragged matrix");
  }
  return RatMatrix::from_rows(rows, cols);
}

namespace {

std::vector<int> int_list(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw SchemaError("missing field \"" + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_array()) throw SchemaError("field \"" + key + "\" must be an array of integers");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw SchemaError("field \"" + key + "\" must be an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

Json to_json(const ProblemSpec& spec) {
  return Json{{"ambient_dim", spec.ambient_dim},
              {"left_twists", spec.left_twists},
              {"left_mults", spec.left_mults},
              {"right_twists", spec.right_twists},
              {"right_mults", spec.right_mults}};
}

ProblemSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("spec must be a JSON object");
  if (!j.contains("ambient_dim") || !j.at("ambient_dim").is_number_integer())
    throw SchemaError("missing integer field \"ambient_dim\"");
  ProblemSpec spec{j.at("ambient_dim").get<int>(), int_list(j, "left_twists"), int_list(j, "left_mults"),
                   int_list(j, "right_twists"), int_list(j, "right_mults")};
  spec.validate();
  return spec;
}

Json to_json(const Polarization& pol) { return Json{{"lambda", to_json(pol.lambda)}, {"mu", to_json(pol.mu)}}; }

Polarization polarization_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lambda") || !j.contains("mu"))
    throw SchemaError("polarization needs \"lambda\" and \"mu\"");
  return Polarization{vec_from_json(j.at("lambda"), "lambda"), vec_from_json(j.at("mu"), "mu")};
}

Json morphism_to_json(const MorphismElement& w) { return Json{{"blocks", morphism_to_polynomials(w)}}; }

MorphismElement morphism_from_json(SystemPtr sys, const Json& j) {
  if (!j.is_object() || !j.contains("blocks")) throw SchemaError("morphism needs \"blocks\"");
  std::vector<std::vector<std::vector<std::vector<std::string>>>> blocks;
  try {
    blocks = j.at("blocks").get<decltype(blocks)>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("\"blocks\" must be nested arrays of polynomial strings");
  }
  return morphism_from_polynomials(sys, blocks);
}

Json dimension_vector_to_json(const DimensionVector& d) { return Json{{"mprime", d.mprime}, {"nprime", d.nprime}}; }

DimensionVector dimension_vector_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("dimension vector must be an object");
  return DimensionVector{int_list(j, "mprime"), int_list(j, "nprime")};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

}  // namespace gitpol
