#pragma once

// Banal (G, mu)-displays as matrices U in L^+G, the Phi-conjugation action of
// H^mu, sigma-conjugacy of b = U mu(p), slopes and nilpotence tests, and
// Cartan double coset membership.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <optional>
#include <utility>
#include <vector>

#include "gdisp/chain.hpp"
#include "gdisp/errors.hpp"
#include "gdisp/group.hpp"
#include "gdisp/matrix.hpp"
#include "gdisp/witt.hpp"

namespace gdisp {

struct Display {
  GroupSpec spec;
  MatW U;
  const RingPtr& ring() const { return U(0, 0).ring(); }
  int length() const { return U(0, 0).length(); }
};

inline Display make_display(const GroupSpec& spec, const MatW& U) {
  require(U.square() && U.rows() == spec.h, ErrorKind::MalformedInput, "display matrix size does not match the group");
  require(determinant(w0(U)).is_unit(), ErrorKind::NonUnit, "display matrix is not invertible");
  if (!spec.is_full_gl())
    require(subgroup_membership(U, spec), ErrorKind::NotInSubgroup, "display matrix is not in G");
  return Display{spec, U};
}

inline FrobMode default_mode(const RingPtr& R) { return R->has_char_p() ? FrobMode::Padded : FrobMode::Exact; }

/// In characteristic p at length n, b = U mu(p) only sees the weight-1
/// columns of U to length n-1; their top digit is set to zero.
inline MatW display_key(const MatW& U, const GroupSpec& spec) {
  return U.map_indexed([&](int, int j, const WittVec& x) {
    if (!spec.weights[static_cast<size_t>(j)]) return x;
    std::vector<RingElem> c = x.coeffs();
    c.back() = RingElem::zero(x.ring());
    return WittVec(x.ring(), c);
  });
}

/// H^{-1} U Phi(H). Exact mode drops one digit; padded mode (char p) keeps the
/// length and returns the normalised key.
inline Display phi_conjugate(const Display& D, const MatW& H, std::optional<FrobMode> mode_opt = std::nullopt) {
  const FrobMode mode = mode_opt.value_or(default_mode(D.ring()));
  require(H.square() && H.rows() == D.spec.h, ErrorKind::MalformedInput, "H has the wrong size");
  require(H(0, 0).ring()->same_as(*D.ring()), ErrorKind::MixedRings, "H and U over different rings");
  require(H(0, 0).length() == D.length(), ErrorKind::MalformedInput, "H and U have different Witt lengths");
  if (mode == FrobMode::Padded) require(D.ring()->has_char_p(), ErrorKind::CharNotP, "padded mode needs pR = 0");
  MatW Phi = divided_frobenius(H, D.spec, mode);
  if (!D.spec.is_full_gl())
    require(subgroup_membership(H, D.spec), ErrorKind::NotInSubgroup, "H fails the subgroup equations");
  auto Hinv = try_inverse(H);
  require(Hinv.has_value(), ErrorKind::NotInHmu, "H is not invertible");
  MatW out = (*Hinv) * D.U * Phi;
  if (mode == FrobMode::Padded) out = display_key(out, D.spec);
  return Display{D.spec, out};
}

namespace detail {

inline std::vector<WittVec> all_witt_vectors(const RingPtr& R, int n, bool ideal_only = false) {
  const uint64_t card = ring_cardinality(*R);
  uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= card;
  std::vector<WittVec> out;
  for (uint64_t idx = 0; idx < total; ++idx) {
    std::vector<RingElem> c;
    uint64_t r = idx;
    for (int i = 0; i < n; ++i) {
      c.push_back(ring_element_at(R, r % card));
      r /= card;
    }
    if (ideal_only && !c[0].is_zero()) continue;
    out.emplace_back(R, c);
  }
  return out;
}

inline std::vector<uint64_t> encode(const MatW& M) {
  std::vector<uint64_t> out;
  for (const auto& x : M.entries())
    for (const auto& c : x.coeffs()) out.push_back(ring_index_of(c));
  return out;
}

inline std::vector<uint64_t> encode(const MatR& M) {
  std::vector<uint64_t> out;
  for (const auto& x : M.entries()) out.push_back(ring_index_of(x));
  return out;
}

/// Odometer over per-entry candidate lists.
template <class T, class F>
void for_each_matrix(int h, const std::vector<std::vector<T>>& choices, F f) {
  std::vector<size_t> idx(choices.size(), 0);
  for (;;) {
    std::vector<T> e;
    for (size_t k = 0; k < choices.size(); ++k) e.push_back(choices[k][idx[k]]);
    f(Mat<T>(h, h, std::move(e)));
    size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == idx.size()) return;
  }
}

inline long double search_size(const std::vector<size_t>& sizes) {
  long double t = 1;
  for (auto s : sizes) t *= static_cast<long double>(s);
  return t;
}

}  // namespace detail

/// All of H^mu(W_n(R)) for a finite ring R.
inline std::vector<MatW> enumerate_hmu(const RingPtr& R, const GroupSpec& spec, int n, long double bound) {
  require(R->is_finite(), ErrorKind::Unenumerable, "ring is not finite");
  long double card = std::pow(static_cast<long double>(ring_cardinality(*R)), n);
  long double size = std::pow(card, spec.h * spec.h) / std::pow(static_cast<long double>(ring_cardinality(*R)),
                                                                   spec.u_minus_positions().size());
  require(size <= bound, ErrorKind::SearchSpaceTooLarge, "H^mu enumeration exceeds the search bound");
  auto all = detail::all_witt_vectors(R, n), ideal = detail::all_witt_vectors(R, n, true);
  std::vector<std::vector<WittVec>> choices;
  for (int i = 0; i < spec.h; ++i)
    for (int j = 0; j < spec.h; ++j) choices.push_back(spec.weight(i, j) == -1 ? ideal : all);
  std::vector<MatW> out;
  detail::for_each_matrix(spec.h, choices, [&](const MatW& H) {
    if (!determinant(w0(H)).is_unit()) return;
    if (!spec.is_full_gl() && !subgroup_membership(H, spec)) return;
    out.push_back(H);
  });
  return out;
}

/// A witness H with phi_conjugate(D1, H) = D2 (compared at the output
/// precision of the chosen mode), or none.
inline std::optional<MatW> are_isomorphic(const Display& D1, const Display& D2, long double bound = 1e6,
                                          std::optional<FrobMode> mode_opt = std::nullopt) {
  const FrobMode mode = mode_opt.value_or(default_mode(D1.ring()));
  require(D1.length() == D2.length() && D1.ring()->same_as(*D2.ring()), ErrorKind::MixedRings,
          "displays live over different rings or lengths");
  MatW target = mode == FrobMode::Exact ? truncated(D2.U, D2.length() - 1) : display_key(D2.U, D2.spec);
  for (const auto& H : enumerate_hmu(D1.ring(), D1.spec, D1.length(), bound))
    if (phi_conjugate(D1, H, mode).U == target) return H;
  return std::nullopt;
}

/// Number of Phi-conjugation orbits on display keys over W_n(F_q).
inline int64_t phi_orbit_count(const RingPtr& F, const GroupSpec& spec, int n, long double bound = 1e6) {
  require(F->kind() == RingKind::Fq, ErrorKind::NotAField, "orbit counts are defined over a finite field");
  const int h = spec.h;
  auto full = detail::all_witt_vectors(F, n);
  std::vector<WittVec> topless;
  for (const auto& x : full)
    if (x[static_cast<size_t>(n - 1)].is_zero()) topless.push_back(x);
  std::vector<std::vector<WittVec>> choices;
  std::vector<size_t> sizes;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      choices.push_back(spec.weights[static_cast<size_t>(j)] ? topless : full);
      sizes.push_back(choices.back().size());
    }
  require(detail::search_size(sizes) <= bound, ErrorKind::SearchSpaceTooLarge, "key enumeration exceeds the bound");
  auto residues = ring_enumerate(F);
  // a key is valid when some choice of the unseen digits makes w_0(U) invertible
  auto valid = [&](const MatW& K) {
    MatR r = w0(K);
    if (n >= 2) return determinant(r).is_unit();
    std::vector<std::pair<int, int>> free;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        if (spec.weights[static_cast<size_t>(j)]) free.emplace_back(i, j);
    std::vector<std::vector<RingElem>> opts;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        opts.push_back(spec.weights[static_cast<size_t>(j)] ? residues : std::vector<RingElem>{r(i, j)});
    bool found = false;
    detail::for_each_matrix(h, opts, [&](const MatR& m) { found = found || determinant(m).is_unit(); });
    return found;
  };
  std::map<std::vector<uint64_t>, size_t> index;
  std::vector<MatW> keys;
  detail::for_each_matrix(h, choices, [&](const MatW& K) {
    if (!valid(K)) return;
    index.emplace(detail::encode(K), keys.size());
    keys.push_back(K);
  });
  auto H = enumerate_hmu(F, spec, n, bound);
  std::vector<char> seen(keys.size(), 0);
  int64_t orbits = 0;
  for (size_t k = 0; k < keys.size(); ++k) {
    if (seen[k]) continue;
    ++orbits;
    Display D{spec, keys[k]};
    for (const auto& g : H) {
      auto it = index.find(detail::encode(phi_conjugate(D, g, FrobMode::Padded).U));
      require(it != index.end(), ErrorKind::IntegralityFailure, "Phi-conjugation left the key set");
      seen[it->second] = 1;
    }
  }
  return orbits;
}

/// b = U mu(p) over GR(p^n, f) for a display over F_q.
inline ShiftedMat display_b(const Display& D) {
  const RingPtr& F = D.ring();
  require(F->kind() == RingKind::Fq, ErrorKind::NotAField, "b is formed over a finite field");
  auto G = Ring::galois(F->p(), D.length(), F->degree());
  MatR b = witt_to_galois(D.U, G);
  for (int i = 0; i < D.spec.h; ++i)
    for (int j = 0; j < D.spec.h; ++j)
      if (D.spec.weights[static_cast<size_t>(j)]) b(i, j) = b(i, j) * p_power(G, 1);
  return ShiftedMat{b, 0};
}

/// h^{-1} b sigma(h) over a Galois ring.
inline ShiftedMat sigma_conjugate(const ShiftedMat& b, const MatR& h) {
  require(b.m(0, 0).ring()->kind() == RingKind::GaloisRing, ErrorKind::NotAField,
          "sigma-conjugation needs W_n of a finite field");
  auto hinv = try_inverse(h);
  require(hinv.has_value(), ErrorKind::NonUnit, "conjugating matrix is not invertible");
  return ShiftedMat{(*hinv) * b.m * sigma(h), b.shift};
}

/// Smith exponents equal min(sorted weights, n): b lies in K mu(p) K modulo p^n.
inline bool truncated_cartan_image(const MatR& b, const GroupSpec& spec) {
  const int n = b(0, 0).ring()->char_exponent();
  std::vector<int> t = spec.weights;
  std::sort(t.begin(), t.end());
  for (auto& x : t) x = std::min(x, n);
  return smith_normal_form(b).exponents == t;
}

/// Number of GL_h(W_n(F_q)) sigma-conjugacy classes in the truncated Cartan
/// double coset of mu(p).
inline int64_t sigma_orbit_count(const RingPtr& F, const GroupSpec& spec, int n, long double bound = 1e6) {
  require(F->kind() == RingKind::Fq, ErrorKind::NotAField, "orbit counts are defined over a finite field");
  auto G = Ring::galois(F->p(), n, F->degree());
  const int h = spec.h;
  auto elems = ring_enumerate(G);
  require(std::pow(static_cast<long double>(elems.size()), h * h) <= bound, ErrorKind::SearchSpaceTooLarge,
          "matrix enumeration exceeds the bound");
  std::vector<std::vector<RingElem>> choices(static_cast<size_t>(h * h), elems);
  std::vector<MatR> bs, group;
  std::map<std::vector<uint64_t>, size_t> index;
  detail::for_each_matrix(h, choices, [&](const MatR& m) {
    if (determinant(m).is_unit()) group.push_back(m);
    if (truncated_cartan_image(m, spec)) {
      index.emplace(detail::encode(m), bs.size());
      bs.push_back(m);
    }
  });
  std::vector<char> seen(bs.size(), 0);
  int64_t orbits = 0;
  for (size_t k = 0; k < bs.size(); ++k) {
    if (seen[k]) continue;
    ++orbits;
    for (const auto& g : group) {
      auto it = index.find(detail::encode(sigma_conjugate(ShiftedMat{bs[k], 0}, g).m));
      require(it != index.end(), ErrorKind::IntegralityFailure, "sigma-conjugation left the double coset");
      seen[it->second] = 1;
    }
  }
  return orbits;
}

using SlopeVec = std::vector<std::pair<mpq_class, int>>;

inline std::string slope_string(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace detail {

/// Root valuations of x^m + c_1 x^{m-1} + ... + c_m over GR(p^n, f), read off
/// the lower convex hull of the points (k, v(c_k)).
inline SlopeVec newton_polygon(const std::vector<RingElem>& c, int guard) {
  const int m = static_cast<int>(c.size()) - 1;
  const int n = c[0].ring()->char_exponent();
  std::vector<std::pair<int, int>> pts;  // known points
  std::vector<int> unknown;
  for (int k = 0; k <= m; ++k) {
    int v = valuation(c[static_cast<size_t>(k)]);
    if (v < n) {
      pts.emplace_back(k, v);
    } else {
      unknown.push_back(k);
    }
  }
  require(!unknown.empty() ? unknown.back() != m : true, ErrorKind::InsufficientPrecision,
          "determinant vanishes at the carried precision");
  std::vector<std::pair<int, int>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      auto [x1, y1] = hull[hull.size() - 2];
      auto [x2, y2] = hull.back();
      // drop the middle point unless it lies strictly below the chord
      if (static_cast<int64_t>(y2 - y1) * (pt.first - x1) >= static_cast<int64_t>(pt.second - y1) * (x2 - x1))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  for (const auto& [x, y] : hull)
    require(y < n - guard, ErrorKind::InsufficientPrecision, "Newton polygon vertex too close to the truncation");
  for (int k : unknown) {
    size_t s = 1;
    while (hull[s].first < k) ++s;
    auto [x1, y1] = hull[s - 1];
    auto [x2, y2] = hull[s];
    mpq_class at = mpq_class(y1) + mpq_class(y2 - y1, x2 - x1) * (k - x1);
    at.canonicalize();
    require(at <= n, ErrorKind::InsufficientPrecision, "undetermined coefficient could lower the Newton polygon");
  }
  SlopeVec out;
  for (size_t s = 1; s < hull.size(); ++s) {
    mpq_class sl(hull[s].second - hull[s - 1].second, hull[s].first - hull[s - 1].first);
    sl.canonicalize();
    out.emplace_back(sl, hull[s].first - hull[s - 1].first);
  }
  return out;
}

}  // namespace detail

/// Slopes of the sigma-linear map p^{-shift} b over GR(p^n, f).
inline SlopeVec newton_slopes(const ShiftedMat& b, int guard = 1) {
  const RingPtr& G = b.m(0, 0).ring();
  require(G->kind() == RingKind::GaloisRing, ErrorKind::NotAField, "slopes need W_n of a finite field");
  require(guard >= 1, ErrorKind::MalformedInput, "guard must be at least 1");
  const int f = G->degree();
  MatR N = b.m;
  for (int i = 1; i < f; ++i) N = N * sigma_power(b.m, i);
  SlopeVec raw = detail::newton_polygon(charpoly(N), guard);
  SlopeVec out;
  for (auto& [s, mult] : raw) {
    mpq_class v = s / f - b.shift;
    v.canonicalize();
    out.emplace_back(v, mult);
  }
  return out;
}

inline SlopeVec newton_slopes(const Display& D, int guard = 1) { return newton_slopes(display_b(D), guard); }

/// Matrix of X -> b sigma(X) b^{-1} on the Lie basis, scaled by the least
/// p^e making it integral; returned with shift e. Clearing the excess p-power
/// of det(b) costs that many digits of precision.
inline ShiftedMat adjoint_matrix(const ShiftedMat& b, const GroupSpec& spec, int guard = 1) {
  const RingPtr& G = b.m(0, 0).ring();
  const int n = G->char_exponent();
  RingElem det = determinant(b.m);
  const int vd = valuation(det);
  require(vd < n - guard, ErrorKind::InsufficientPrecision, "det(b) is not determined at the carried precision");
  MatR adj = adjugate(b.m);
  const int excess = std::min(vd, valuation(adj));
  const int e = vd - excess;
  auto Gs = Ring::galois(G->p(), n - excess, G->degree());
  // p^e b^{-1} = (adj / p^excess) u^{-1}, exact modulo p^(n - excess)
  MatR binv_scaled = change_precision(adj.map([&](const RingElem& x) { return divide_by_p_power(x, excess); }), Gs)
                         .scaled(change_precision(unit_part(det).inv(), Gs));
  MatR bs = change_precision(b.m, Gs);
  const int m = spec.lie_dim();
  MatR M(m, m, RingElem::zero(Gs));
  for (int a = 0; a < m; ++a) {
    std::vector<RingElem> unit(static_cast<size_t>(m), RingElem::zero(Gs));
    unit[static_cast<size_t>(a)] = RingElem::one(Gs);
    MatR Y = bs * lie_element(unit, spec) * binv_scaled;
    auto coords = lie_coordinates(Y, spec);
    for (int r = 0; r < m; ++r) M(r, a) = coords[static_cast<size_t>(r)];
  }
  return ShiftedMat{M, e};
}

inline SlopeVec adjoint_slopes(const ShiftedMat& b, const GroupSpec& spec, int guard = 1) {
  return newton_slopes(adjoint_matrix(b, spec, guard), guard);
}

inline SlopeVec adjoint_slopes(const Display& D, int guard = 1) {
  return adjoint_slopes(display_b(D), D.spec, guard);
}

/// Nilpotence of X -> Ad(w_0(U)) Frob(pi(X)) on R (x) Lie G, by iteration.
inline bool is_adjoint_nilpotent(const Display& D) {
  const RingPtr& R = D.ring();
  require(R->has_char_p(), ErrorKind::CharNotP, "adjoint nilpotence test needs pR = 0");
  MatR u = w0(D.U);
  MatR uinv = inverse(u);
  const int m = D.spec.lie_dim();
  const int steps = m * (R->nilpotency_bound() + 1) + 2;
  for (int a = 0; a < m; ++a) {
    std::vector<RingElem> unit(static_cast<size_t>(m), RingElem::zero(R));
    unit[static_cast<size_t>(a)] = RingElem::one(R);
    MatR X = lie_element(unit, D.spec);
    bool dead = false;
    for (int s = 0; s < steps && !dead; ++s) {
      MatR Y = lie_projection_pi(X, D.spec).map([](const RingElem& x) { return x.base_frobenius(); });
      X = u * Y * uinv;
      dead = std::all_of(X.entries().begin(), X.entries().end(), [](const RingElem& x) { return x.is_zero(); });
    }
    if (!dead) return false;
  }
  return true;
}

/// Zink nilpotence over a finite field: every Newton slope is positive.
inline bool is_v_nilpotent(const ShiftedMat& b, int guard = 1) {
  for (const auto& [s, m] : newton_slopes(b, guard))
    if (s <= 0) return false;
  return true;
}

/// b = p^{-shift} B in K mu(p) K: elementary divisors of B equal sorted weights + shift.
inline bool cartan_membership(const ShiftedMat& b, const GroupSpec& spec, int guard = 1) {
  require(spec.is_full_gl(), ErrorKind::MalformedInput, "Cartan membership is implemented for GL_h");
  require(b.m.rows() == spec.h, ErrorKind::MalformedInput, "matrix size does not match the group");
  const int n = b.m(0, 0).ring()->char_exponent();
  std::vector<int> t = spec.weights;
  std::sort(t.begin(), t.end());
  for (auto& x : t) x += b.shift;
  require(t.front() >= 0, ErrorKind::IntegralityFailure, "negative elementary divisor target");
  require(t.back() < n - guard, ErrorKind::InsufficientPrecision, "target exponent too close to the truncation");
  return smith_normal_form(b.m).exponents == t;
}

}  // namespace gdisp
