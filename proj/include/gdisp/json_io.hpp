#pragma once

// JSON encodings (schema "v1") for rings, elements, Witt vectors, matrices,
// group data, displays and slope vectors.

#include <json.hpp>

#include "gdisp/chain.hpp"
#include "gdisp/display.hpp"
#include "gdisp/group.hpp"
#include "gdisp/rings.hpp"
#include "gdisp/witt.hpp"

namespace gdisp::json_io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "v1";

inline void expect(bool ok, const std::string& what) { require(ok, ErrorKind::MalformedInput, what); }

inline json mono_to_json(const Mono& m, size_t nvars) {
  json a = json::array();
  for (size_t v = 0; v < nvars; ++v) a.push_back(m.e[v]);
  return a;
}

inline Mono mono_from_json(const json& j, size_t nvars) {
  expect(j.is_array() && j.size() == nvars, "monomial exponent vector has the wrong length");
  Mono m;
  for (size_t v = 0; v < nvars; ++v) m.e[v] = j[v].get<uint16_t>();
  return m;
}

inline json poly_to_json(const IntPoly& P) {
  json terms = json::array();
  for (const auto& [m, c] : P.terms())
    terms.push_back({c.get_str(), mono_to_json(m, static_cast<size_t>(P.nvars()))});
  return {{"nvars", P.nvars()}, {"terms", terms}};
}

inline IntPoly poly_from_json(const json& j) {
  expect(j.is_object() && j.contains("nvars") && j.contains("terms"), "polynomial needs nvars and terms");
  const int nv = j["nvars"].get<int>();
  IntPoly P(nv);
  for (const auto& t : j["terms"]) {
    expect(t.is_array() && t.size() == 2, "polynomial term must be [coefficient, exponents]");
    mpz_class c(t[0].is_string() ? t[0].get<std::string>() : std::to_string(t[0].get<int64_t>()));
    P = P + IntPoly::monomial(nv, mono_from_json(t[1], static_cast<size_t>(nv)), c);
  }
  return P;
}

// ---- rings -----------------------------------------------------------------

inline json ring_to_json(const RingPtr& R) {
  switch (R->kind()) {
    case RingKind::Fq:
      return {{"kind", "Fq"}, {"p", R->p()}, {"f", R->degree()}, {"modulus", R->modulus()}};
    case RingKind::ZmodPM:
      return {{"kind", "ZmodPM"}, {"p", R->p()}, {"m", R->char_exponent()}};
    case RingKind::GaloisRing:
      return {{"kind", "GaloisRing"}, {"p", R->p()}, {"n", R->char_exponent()}, {"f", R->degree()}};
    case RingKind::QuotientPoly: {
      json rels = json::array();
      for (const auto& r : R->relations()) rels.push_back(mono_to_json(r, R->vars().size()));
      return {{"kind", "QuotientPoly"}, {"base", ring_to_json(R->base())}, {"vars", R->vars()}, {"relations", rels}};
    }
    case RingKind::IntegerPoly:
      return {{"kind", "IntegerPoly"}, {"p", R->p()}, {"vars", R->vars()}};
  }
  fail(ErrorKind::MalformedInput, "unknown ring kind");
}

inline RingPtr ring_from_json(const json& j) {
  expect(j.is_object() && j.contains("kind"), "ring descriptor needs a kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "Fq")
    return Ring::fq(j.at("p").get<int64_t>(), j.at("f").get<int>(),
                    j.contains("modulus") ? j["modulus"].get<std::vector<int64_t>>() : std::vector<int64_t>{});
  if (kind == "ZmodPM") return Ring::zmod(j.at("p").get<int64_t>(), j.at("m").get<int>());
  if (kind == "GaloisRing") return Ring::galois(j.at("p").get<int64_t>(), j.at("n").get<int>(), j.at("f").get<int>());
  if (kind == "QuotientPoly") {
    auto vars = j.at("vars").get<std::vector<std::string>>();
    std::vector<Mono> rels;
    for (const auto& r : j.at("relations")) rels.push_back(mono_from_json(r, vars.size()));
    return Ring::quotient(ring_from_json(j.at("base")), vars, rels);
  }
  if (kind == "IntegerPoly")
    return Ring::integer_poly(j.at("vars").get<std::vector<std::string>>(), j.at("p").get<int64_t>());
  fail(ErrorKind::MalformedInput, "unknown ring kind " + kind);
}

// ---- elements: coefficient arrays, lowest degree first ---------------------

inline json elem_to_json(const RingElem& x) {
  if (x.ring()->kind() == RingKind::IntegerPoly) return poly_to_json(x.poly());
  return x.coeffs();
}

/// Accepts a coefficient array or a bare integer.
inline RingElem elem_from_json(const json& j, const RingPtr& R) {
  if (R->kind() == RingKind::IntegerPoly) {
    if (j.is_number_integer()) return RingElem::from_int(R, j.get<long>());
    return RingElem::from_poly(R, poly_from_json(j));
  }
  if (j.is_number_integer()) return RingElem::from_int(R, j.get<long>());
  expect(j.is_array() && j.size() <= R->width(), "element must be a coefficient array of length <= " +
                                                      std::to_string(R->width()));
  std::vector<int64_t> c(R->width(), 0);
  for (size_t i = 0; i < j.size(); ++i) c[i] = j[i].get<int64_t>();
  return RingElem::from_coeffs(R, c);
}

inline json witt_coeffs_to_json(const WittVec& x) {
  json a = json::array();
  for (const auto& c : x.coeffs()) a.push_back(elem_to_json(c));
  return a;
}

inline WittVec witt_coeffs_from_json(const json& j, const RingPtr& R, int n) {
  expect(j.is_array() && static_cast<int>(j.size()) <= n, "Witt vector has more than n coordinates");
  std::vector<RingElem> c;
  for (const auto& e : j) c.push_back(elem_from_json(e, R));
  while (static_cast<int>(c.size()) < n) c.push_back(RingElem::zero(R));
  return WittVec(R, c);
}

inline json witt_to_json(const WittVec& x) {
  return {{"ring", ring_to_json(x.ring())}, {"n", x.length()}, {"coeffs", witt_coeffs_to_json(x)}};
}

inline WittVec witt_from_json(const json& j, const RingPtr& fallback = nullptr) {
  RingPtr R = j.contains("ring") ? ring_from_json(j["ring"]) : fallback;
  expect(R != nullptr, "Witt vector needs a ring");
  const int n = j.contains("n") ? j["n"].get<int>() : static_cast<int>(j.at("coeffs").size());
  return witt_coeffs_from_json(j.at("coeffs"), R, n);
}

// ---- matrices ----------------------------------------------------------------

inline json matr_to_json(const MatR& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(elem_to_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline MatR matr_from_json(const json& j, const RingPtr& R) {
  expect(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
  const int r = static_cast<int>(j.size());
  const int c = static_cast<int>(j[0].size());
  std::vector<RingElem> e;
  for (const auto& row : j) {
    expect(row.is_array() && static_cast<int>(row.size()) == c, "ragged matrix");
    for (const auto& x : row) e.push_back(elem_from_json(x, R));
  }
  return MatR(r, c, e);
}

inline json matw_to_json(const MatW& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(witt_coeffs_to_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline MatW matw_from_json(const json& j, const RingPtr& R, int n) {
  expect(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
  const int r = static_cast<int>(j.size());
  const int c = static_cast<int>(j[0].size());
  std::vector<WittVec> e;
  for (const auto& row : j) {
    expect(row.is_array() && static_cast<int>(row.size()) == c, "ragged matrix");
    for (const auto& x : row) e.push_back(witt_coeffs_from_json(x, R, n));
  }
  return MatW(r, c, e);
}

inline json shifted_to_json(const ShiftedMat& b) {
  return {{"ring", ring_to_json(b.m(0, 0).ring())}, {"m", matr_to_json(b.m)}, {"shift", b.shift}};
}

inline ShiftedMat shifted_from_json(const json& j, const RingPtr& fallback = nullptr) {
  RingPtr R = j.contains("ring") ? ring_from_json(j["ring"]) : fallback;
  expect(R != nullptr, "matrix needs a ring");
  return ShiftedMat{matr_from_json(j.at("m"), R), j.value("shift", 0)};
}

// ---- groups and displays -----------------------------------------------------

inline json group_to_json(const GroupSpec& s) {
  json eqs = json::array();
  for (const auto& P : s.subgroup_eqs) eqs.push_back(poly_to_json(P));
  return {{"name", s.name}, {"h", s.h}, {"weights", s.weights}, {"subgroup_eqs", eqs}, {"lie_basis", s.lie_basis}};
}

/// GL and SL are rebuilt from their weights; anything else needs explicit
/// equations and Lie basis.
inline GroupSpec group_from_json(const json& j) {
  expect(j.is_object() && j.contains("weights"), "group needs weights");
  auto w = j["weights"].get<std::vector<int>>();
  expect(!j.contains("h") || j["h"].get<size_t>() == w.size(), "h does not match the weight vector");
  const std::string name = j.value("name", "GL");
  GroupSpec s;
  if (name == "GL" && !j.contains("subgroup_eqs")) return GroupSpec::gl(w);
  if (name == "SL" && !j.contains("subgroup_eqs")) return GroupSpec::sl(w);
  s.h = static_cast<int>(w.size());
  s.weights = w;
  s.name = name;
  for (const auto& e : j.at("subgroup_eqs")) s.subgroup_eqs.push_back(poly_from_json(e));
  s.lie_basis = j.at("lie_basis").get<std::vector<IntMat>>();
  s.validate();
  return s;
}

inline json display_to_json(const Display& D) {
  return {{"schema", kSchema},
          {"group", group_to_json(D.spec)},
          {"ring", ring_to_json(D.ring())},
          {"n", D.length()},
          {"U", matw_to_json(D.U)}};
}

inline Display display_from_json(const json& j) {
  auto spec = group_from_json(j.at("group"));
  auto R = ring_from_json(j.at("ring"));
  return make_display(spec, matw_from_json(j.at("U"), R, j.at("n").get<int>()));
}

inline json slopes_to_json(const SlopeVec& s) {
  json a = json::array();
  for (const auto& [q, m] : s) a.push_back({slope_string(q), m});
  return {{"slopes", a}};
}

inline SlopeVec slopes_from_json(const json& j) {
  SlopeVec out;
  for (const auto& e : j.at("slopes")) {
    expect(e.is_array() && e.size() == 2, "slope entry must be [slope, multiplicity]");
    mpq_class q;
    if (e[0].is_string()) {
      q = mpq_class(e[0].get<std::string>());
    } else {
      q = mpq_class(e[0].get<long>());
    }
    q.canonicalize();
    out.emplace_back(q, e[1].get<int>());
  }
  return out;
}

}  // namespace gdisp::json_io
