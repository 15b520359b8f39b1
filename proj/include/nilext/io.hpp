#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "nilext/liftext.hpp"

namespace nilext::io {

using json = nlohmann::json;

/// Raised for JSON that does not match a schema below. Counts as a
/// precondition failure.
class ParseError : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad ") + what + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalars and groups

inline json to_json(const Rational& q) { return q.str(); }

inline Rational parse_rational(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<Int>());
  try {
    return Rational::parse(detail::get<std::string>(j, "rational"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("bad rational: ") + e.what());
  }
}

inline json to_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

inline std::vector<Rational> parse_rationals(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(parse_rational(x));
  return out;
}

/// {"factors": [n_1, ...]}
inline json to_json(const FinAbGroup& g) { return {{"factors", g.factors()}}; }

inline FinAbGroup parse_group(const json& j) {
  auto f = detail::get<std::vector<Int>>(detail::field(j, "factors"), "factors");
  for (Int n : f)
    if (n < 1) throw ParseError("group factors must be positive");
  return FinAbGroup(f);
}

/// Row-major nested arrays.
inline json to_json(const IntMatrix& m) { return m.to_rows(); }

inline IntMatrix parse_matrix(const json& j, std::size_t cols) {
  auto rows = detail::get<std::vector<std::vector<Int>>>(j, "matrix");
  for (const auto& r : rows)
    if (r.size() != cols) throw ParseError("matrix row has the wrong length");
  return IntMatrix::from_rows(rows, cols);
}

/// {"sub": group, "amb": group, "map": matrix (amb rank x sub rank)}
inline json to_json(const SubgroupEmbedding& e) {
  return {{"sub", to_json(e.sub)}, {"amb", to_json(e.amb)}, {"map", to_json(e.map)}};
}

inline SubgroupEmbedding parse_embedding(const json& j) {
  SubgroupEmbedding e{parse_group(detail::field(j, "sub")), parse_group(detail::field(j, "amb")), IntMatrix()};
  e.map = parse_matrix(detail::field(j, "map"), e.sub.rank());
  if (e.map.rows() != e.amb.rank()) throw ParseError("embedding matrix has the wrong number of rows");
  e.validate();
  return e;
}

// ---------------------------------------------------------------------------
// Polynomial maps

inline Target parse_target(const std::string& s) {
  if (s == "real") return Target::real();
  if (s == "torus") return Target::torus();
  if (s.rfind("cyclic:", 0) == 0) {
    try {
      return Target::cyclic(std::stoll(s.substr(7)));
    } catch (const std::logic_error&) {
      throw ParseError("bad cyclic target \"" + s + "\"");
    }
  }
  throw ParseError("unknown target \"" + s + "\"");
}

/// {"r", "k", "target", "coeffs": [{"w": [...], "a": "num/den"}, ...]}.
/// Only nonzero coefficients are written. A fiber of dimension d > 1 adds
/// "d" and writes "a" as an array of d rationals.
inline json to_json(const PolyMap& f) {
  json coeffs = json::array();
  for (std::size_t i = 0; i < f.num_terms(); ++i) {
    bool any = false;
    for (int c = 0; c < f.dim(); ++c) any = any || !f.coeff(i, c).is_zero();
    if (!any) continue;
    json a;
    if (f.dim() == 1) {
      a = to_json(f.coeff(i, 0));
    } else {
      a = json::array();
      for (int c = 0; c < f.dim(); ++c) a.push_back(to_json(f.coeff(i, c)));
    }
    coeffs.push_back({{"w", f.indices()[i]}, {"a", a}});
  }
  json j = {{"r", f.arity()}, {"k", f.degree_bound()}, {"target", f.target().str()}, {"coeffs", coeffs}};
  if (f.dim() != 1) j["d"] = f.dim();
  return j;
}

inline PolyMap parse_polymap(const json& j) {
  int r = detail::get<int>(detail::field(j, "r"), "r");
  int k = detail::get<int>(detail::field(j, "k"), "k");
  int d = j.contains("d") ? detail::get<int>(j.at("d"), "d") : 1;
  if (r < 0 || k < 0 || d < 1) throw ParseError("polymap needs r >= 0, k >= 0, d >= 1");
  PolyMap f(r, k, d, parse_target(detail::get<std::string>(detail::field(j, "target"), "target")));
  const json& coeffs = detail::field(j, "coeffs");
  if (!coeffs.is_array()) throw ParseError("coeffs must be an array");
  for (const auto& t : coeffs) {
    auto w = detail::get<MultiIndex>(detail::field(t, "w"), "multi-index");
    if (static_cast<int>(w.size()) != r) throw ParseError("multi-index has the wrong length");
    auto idx = f.indices().find(w);
    if (!idx) throw ParseError("multi-index above the degree bound");
    const json& a = detail::field(t, "a");
    if (d == 1 && !a.is_array()) {
      f.coeff(*idx, 0) = parse_rational(a);
    } else {
      auto v = parse_rationals(a);
      if (static_cast<int>(v.size()) != d) throw ParseError("coefficient vector has the wrong length");
      for (int c = 0; c < d; ++c) f.coeff(*idx, c) = v[static_cast<std::size_t>(c)];
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Functions on groups

/// {"group": ..., "values": [[re, im], ...]} in row-major group order.
inline json to_json(const GroupFunction& f) {
  json vals = json::array();
  for (auto z : f.values) vals.push_back({z.real(), z.imag()});
  return {{"group", to_json(f.group)}, {"values", vals}};
}

inline std::vector<Complex> parse_values(const json& j) {
  if (!j.is_array()) throw ParseError("values must be an array of [re, im] pairs");
  std::vector<Complex> out;
  for (const auto& p : j) {
    auto v = detail::get<std::vector<double>>(p, "[re, im] pair");
    if (v.size() != 2) throw ParseError("values must be [re, im] pairs");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

inline GroupFunction parse_function(const json& j) {
  FinAbGroup g = parse_group(detail::field(j, "group"));
  auto v = parse_values(detail::field(j, "values"));
  if (static_cast<Int>(v.size()) != g.order()) throw ParseError("function table size differs from the group order");
  return GroupFunction(std::move(g), std::move(v));
}

// ---------------------------------------------------------------------------
// H' points, orbits, nilsequences

inline json to_json(const HPoint& h) { return {{"poly", to_json(h.poly)}, {"shift", to_json(h.shift)}}; }

inline HPoint parse_hpoint(const json& j) {
  HPoint h{parse_polymap(detail::field(j, "poly")), parse_rationals(detail::field(j, "shift"))};
  if (h.poly.target().kind != TargetKind::Real) throw ParseError("H' polynomial parts are real-valued");
  if (static_cast<int>(h.shift.size()) != h.poly.arity()) throw ParseError("shift length differs from the arity");
  return h;
}

inline json to_json(const LinearOrbit& L) {
  json gens = json::array();
  for (const auto& h : L.generators()) gens.push_back(to_json(h));
  return {{"base", to_json(L.base())}, {"generators", gens}, {"moduli", L.moduli()}};
}

inline LinearOrbit parse_linear_orbit(const json& j) {
  HPoint base = parse_hpoint(detail::field(j, "base"));
  const json& g = detail::field(j, "generators");
  if (!g.is_array()) throw ParseError("generators must be an array");
  std::vector<HPoint> gens;
  for (const auto& h : g) gens.push_back(parse_hpoint(h));
  return LinearOrbit(std::move(base), std::move(gens), detail::get<std::vector<Int>>(detail::field(j, "moduli"), "moduli"));
}

inline json to_json(const Complexity& c) {
  return {{"k", c.k}, {"r", c.r}, {"d", c.d}, {"max_den", c.max_den}, {"nonsplit_steps", c.nonsplit_steps}};
}

/// {"domain", "form": "polynomial" | "linear", "orbit", "freq", "shift",
///  "twist", "nonsplit_steps"}. Value at x: e(freq . theta(x - shift) + twist . x).
inline json to_json(const Nilsequence& N) {
  return {{"domain", to_json(N.domain)},
          {"form", N.is_linear() ? "linear" : "polynomial"},
          {"orbit", N.is_linear() ? to_json(N.linear()) : to_json(N.poly())},
          {"freq", N.freq},
          {"shift", N.shift},
          {"twist", N.twist},
          {"nonsplit_steps", N.nonsplit_steps},
          {"complexity", to_json(N.complexity())}};
}

inline Nilsequence parse_nilsequence(const json& j) {
  Nilsequence N;
  N.domain = parse_group(detail::field(j, "domain"));
  auto form = detail::get<std::string>(detail::field(j, "form"), "form");
  if (form == "linear") N.orbit = parse_linear_orbit(detail::field(j, "orbit"));
  else if (form == "polynomial") N.orbit = parse_polymap(detail::field(j, "orbit"));
  else throw ParseError("form must be \"linear\" or \"polynomial\"");
  const auto zeros = std::vector<Int>(N.domain.rank(), 0);
  N.freq = j.contains("freq") ? detail::get<std::vector<Int>>(j.at("freq"), "freq")
                              : std::vector<Int>(static_cast<std::size_t>(N.fiber_dim()), 1);
  N.shift = j.contains("shift") ? detail::get<std::vector<Int>>(j.at("shift"), "shift") : zeros;
  N.twist = j.contains("twist") ? detail::get<std::vector<Int>>(j.at("twist"), "twist") : zeros;
  N.nonsplit_steps = j.contains("nonsplit_steps") ? detail::get<int>(j.at("nonsplit_steps"), "nonsplit_steps") : 0;
  N.validate();
  return N;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const InfeasibilityCertificate& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.functional.size(); ++i)
    if (c.functional[i] != 0) rows.push_back({{"row", c.system.labels[i]}, {"weight", c.functional[i]}});
  return {{"functional", rows}, {"value", to_json(c.value)}, {"verified", c.verify()}};
}

inline json to_json(const CorrelationReport& r) {
  return {{"delta", r.delta},
          {"epsilon0", r.epsilon0},
          {"subgroup_correlation", r.subgroup_correlation},
          {"epsilon", r.epsilon},
          {"bound", r.bound},
          {"k", r.k},
          {"index", r.index},
          {"character", r.character},
          {"complexity", to_json(r.complexity)}};
}

// ---------------------------------------------------------------------------
// Files

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace nilext::io
