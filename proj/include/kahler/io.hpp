#pragma once

// JSON wire format. Indices in sparse entries are 1-based and follow the basis
// order e_1..e_n, f_1..f_n. Dense arrays are flat in row-major order:
// tensors as H(i,j,k) at (i*m + j)*m + k, one-forms as theta(a,b,k) likewise.

#include <json.hpp>

#include <string>
#include <vector>

#include "kahler/geometry.hpp"
#include "kahler/hspace.hpp"

namespace kahler::io {

using json = nlohmann::json;

/// Malformed or incomplete JSON input.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline void flatten(const json& j, std::vector<double>& out) {
  if (j.is_array()) {
    for (const auto& v : j) flatten(v, out);
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw SchemaError("dense arrays may only contain numbers");
  }
}

inline int index1(const json& e, const char* key, int m) {
  const json& v = require(e, key, "sparse entry");
  if (!v.is_number_integer()) throw SchemaError(std::string("sparse index '") + key + "' must be an integer");
  const int i = v.get<int>();
  if (i < 1 || i > m) throw SchemaError(std::string("sparse index '") + key + "' out of range 1.." + std::to_string(m));
  return i - 1;
}

}  // namespace detail

inline HermitianSpace space_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("space must be an object");
  const Kind kind = [&] {
    const json& k = detail::require(j, "kind", "space");
    if (!k.is_string()) throw SchemaError("space.kind must be \"para\" or \"pseudo\"");
    try {
      return kind_from_string(k.get<std::string>());
    } catch (const Error& e) {
      throw SchemaError(e.what());
    }
  }();
  if (j.contains("e_signs")) {
    const auto signs = j.at("e_signs").get<std::vector<int>>();
    HermitianSpace s = HermitianSpace::from_e_signs(kind, signs);
    if (j.contains("m") && j.at("m").get<int>() != s.dim())
      throw DimensionError("space.m disagrees with e_signs");
    if (j.contains("p") && j.at("p").get<int>() != s.p())
      throw ParityError("space.p disagrees with e_signs");
    return s;
  }
  const int m = detail::require(j, "m", "space").get<int>();
  const int p = detail::require(j, "p", "space").get<int>();
  const int q = detail::require(j, "q", "space").get<int>();
  return make_space(m, p, q, kind);
}

inline json space_to_json(const HermitianSpace& s) {
  return {{"m", s.dim()}, {"p", s.p()}, {"q", s.q()}, {"kind", to_string(s.kind())},
          {"e_signs", s.e_signs()}};
}

inline Tensor3 tensor_from_json(const json& j, int m) {
  if (!j.is_object()) throw SchemaError("tensor must be an object with 'dense' or 'sparse'");
  Tensor3 t(m);
  if (j.contains("dense")) {
    std::vector<double> flat;
    detail::flatten(j.at("dense"), flat);
    if (flat.size() != t.size())
      throw SchemaError("dense tensor needs m^3 = " + std::to_string(t.size()) + " entries, got " +
                        std::to_string(flat.size()));
    std::copy(flat.begin(), flat.end(), t.data().begin());
  } else if (j.contains("sparse")) {
    for (const auto& e : j.at("sparse"))
      t(detail::index1(e, "i", m), detail::index1(e, "j", m), detail::index1(e, "k", m)) +=
          detail::require(e, "v", "sparse entry").get<double>();
  } else {
    throw SchemaError("tensor must contain 'dense' or 'sparse'");
  }
  return t;
}

inline json tensor_to_json(const Tensor3& t) {
  return {{"dense", std::vector<double>(t.data().begin(), t.data().end())}};
}

inline EndoOneForm endo_from_json(const json& j, int m) {
  if (!j.is_object()) throw SchemaError("theta must be an object with 'dense' or 'sparse'");
  EndoOneForm t(m);
  if (j.contains("dense")) {
    std::vector<double> flat;
    detail::flatten(j.at("dense"), flat);
    if (flat.size() != static_cast<std::size_t>(m) * m * m)
      throw SchemaError("dense theta needs m^3 entries");
    std::size_t n = 0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < m; ++k) t(a, b, k) = flat[n++];
  } else if (j.contains("sparse")) {
    for (const auto& e : j.at("sparse"))
      t(detail::index1(e, "a", m), detail::index1(e, "b", m), detail::index1(e, "k", m)) +=
          detail::require(e, "v", "sparse entry").get<double>();
  } else {
    throw SchemaError("theta must contain 'dense' or 'sparse'");
  }
  return t;
}

inline json endo_to_json(const EndoOneForm& t) {
  const int m = t.dim();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m) * m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < m; ++k) flat.push_back(t(a, b, k));
  return {{"dense", flat}};
}

inline json covector_to_json(const Covector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Covector covector_from_json(const json& j, int m) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != m) throw SchemaError("covector needs m entries");
  return Eigen::Map<const Covector>(v.data(), m);
}

/// Declarative chart families:
///   {"family":"flat"}
///   {"family":"conformal","params":{"base":<chart>?,"coefficients":[m],"bump_radius":r?}}
///   {"family":"perturbed_j","params":{"theta":<one-form>,"bump_radius":r?}}
///   {"family":"perturbed_metric","params":{"theta":<one-form>,"bump_radius":r?}}
///   {"family":"product","params":{"first":{"space":..,"chart":..},"second":{"space":..,"chart":..}}}
///   {"family":"negated","params":{"base":<chart>}}
/// The returned chart's space is authoritative (products and negation change it).
inline Chart chart_from_json(const json& j, const HermitianSpace& s) {
  const std::string family = detail::require(j, "family", "chart").get<std::string>();
  const json params = j.value("params", json::object());
  const double radius = params.value("bump_radius", 1.0);
  if (family == "flat") return flat_chart(s, radius);
  if (family == "conformal") {
    const Chart base = params.contains("base") ? chart_from_json(params.at("base"), s) : flat_chart(s);
    return conformal_chart(base, covector_from_json(detail::require(params, "coefficients", "conformal"), base.dim()),
                           radius);
  }
  if (family == "perturbed_j")
    return perturbed_j_chart(s, endo_from_json(detail::require(params, "theta", "perturbed_j"), s.dim()), radius);
  if (family == "perturbed_metric")
    return perturbed_metric_chart(s, endo_from_json(detail::require(params, "theta", "perturbed_metric"), s.dim()),
                                  radius);
  if (family == "negated") return negated_chart(chart_from_json(detail::require(params, "base", "negated"), s));
  if (family == "product") {
    auto factor = [&](const char* key) {
      const json& f = detail::require(params, key, "product");
      const HermitianSpace fs = space_from_json(detail::require(f, "space", "product factor"));
      return chart_from_json(detail::require(f, "chart", "product factor"), fs);
    };
    return product_chart(factor("first"), factor("second"));
  }
  throw SchemaError("unknown chart family '" + family + "'");
}

inline json label_to_json(const ClassLabel& l) {
  json j{{"subset", l.subset_string()}, {"label", l.display()}};
  j["name"] = l.name ? json(*l.name) : json(nullptr);
  return j;
}

inline json report_to_json(const DecompositionReport& r, const HermitianSpace& s, bool with_components) {
  json j;
  j["space"] = space_to_json(s);
  j["space_description"] = s.describe();
  j["tolerance"] = r.tol;
  j["norms"] = r.norms;
  j["quadratic_norms"] = r.quadratic_norms;
  j["tau1"] = covector_to_json(r.tau1);
  j["residuals"] = {{"membership", r.residual_membership},
                    {"reconstruction", r.residual_reconstruction},
                    {"w3_crosscheck", r.residual_w3_crosscheck},
                    {"orthogonality", r.max_orthogonality}};
  j.update(label_to_json(r.label));
  if (with_components) {
    json comps = json::array();
    for (const auto& c : r.components) comps.push_back(tensor_to_json(c));
    j["components"] = comps;
  }
  return j;
}

}  // namespace kahler::io
