#pragma once

// Truncated p-typical Witt vectors W_n(R) over the coefficient rings of
// rings.hpp. Ring operations evaluate universal integer polynomials that are
// solved from the ghost equations once per prime and cached.

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gdisp/errors.hpp"
#include "gdisp/intpoly.hpp"
#include "gdisp/rings.hpp"

namespace gdisp {

/// Universal Witt polynomials for a prime p and length n.
///
/// Variables are interleaved so that the k-th polynomial does not depend on
/// n: in sum/prod, x_i is variable 2i and y_i is variable 2i+1; in neg and
/// frob, x_i is variable i.
struct UniversalWittPolys {
  int64_t p = 2;
  int n = 1;
  std::vector<IntPoly> sum;   // S_0..S_{n-1}
  std::vector<IntPoly> prod;  // P_0..P_{n-1}
  std::vector<IntPoly> neg;   // N_0..N_{n-1}
  std::vector<IntPoly> frob;  // F_0..F_{n-2}: w_k(F x) = w_{k+1}(x)
};

namespace detail {

inline mpz_class mpz_pow(int64_t p, unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), k);
  return r;
}

/// Ghost polynomial w_k in the given coordinate polynomials.
inline IntPoly ghost_poly(int64_t p, const std::vector<IntPoly>& coords, int k, int nvars) {
  IntPoly acc(nvars);
  for (int i = 0; i <= k; ++i)
    acc = acc + coords[static_cast<size_t>(i)].pow(mpz_pow(p, static_cast<unsigned long>(k - i)).get_ui())
                    .scaled(mpz_pow(p, static_cast<unsigned long>(i)));
  return acc;
}

/// Solve Z_k from p^k Z_k = target - sum_{i<k} p^i Z_i^{p^(k-i)}; asserts
/// that the division is exact.
inline IntPoly solve_next(int64_t p, const std::vector<IntPoly>& solved, const IntPoly& target) {
  int k = static_cast<int>(solved.size());
  IntPoly rest = target;
  for (int i = 0; i < k; ++i)
    rest = rest - solved[static_cast<size_t>(i)]
                      .pow(mpz_pow(p, static_cast<unsigned long>(k - i)).get_ui())
                      .scaled(mpz_pow(p, static_cast<unsigned long>(i)));
  mpz_class d = mpz_pow(p, static_cast<unsigned long>(k));
  if (!rest.divisible_by(d)) fail(ErrorKind::IntegralityFailure, "Witt polynomial is not integral");
  return rest.exact_div(d);
}

/// Upper bound on the number of monomials of S_k: monomials in x_0..x_k,
/// y_0..y_k of weighted degree p^k with x_i, y_i of weight p^i.
inline long double witt_term_bound(int64_t p, int k) {
  auto N = static_cast<size_t>(ipow(p, k));
  std::vector<long double> ways(N + 1, 0.0L);
  ways[0] = 1.0L;
  for (int i = 0; i <= k; ++i)
    for (int copy = 0; copy < 2; ++copy) {
      auto w = static_cast<size_t>(ipow(p, i));
      for (size_t s = w; s <= N; ++s) ways[s] += ways[s - w];
    }
  return ways[N];
}

struct WittPolyCache {
  std::mutex mu;
  std::map<int64_t, std::shared_ptr<UniversalWittPolys>> longest;
  std::map<std::pair<int64_t, int>, std::shared_ptr<const UniversalWittPolys>> by_length;
};

inline WittPolyCache& witt_cache() {
  static WittPolyCache cache;
  return cache;
}

}  // namespace detail

/// Largest predicted polynomial size derive_universal_polys will attempt.
inline constexpr long double kMaxWittTerms = 5.0e6L;

/// Derive (or fetch) the universal polynomials for (p, n).
inline std::shared_ptr<const UniversalWittPolys> derive_universal_polys(int64_t p, int n) {
  require(detail::is_prime(p), ErrorKind::MalformedInput, "p must be prime");
  require(n >= 1 && 2 * n <= kMaxVars, ErrorKind::MalformedInput, "Witt length out of supported range");
  auto& cache = detail::witt_cache();
  std::lock_guard lock(cache.mu);
  if (auto it = cache.by_length.find({p, n}); it != cache.by_length.end()) return it->second;

  auto& full = cache.longest[p];
  if (!full) {
    full = std::make_shared<UniversalWittPolys>();
    full->p = p;
    full->n = 0;
  }
  // Extend the longest table in place; earlier polynomials never change.
  const int nv2 = kMaxVars;  // interleaved x/y variables
  std::vector<IntPoly> xs, ys, xf;
  for (int i = 0; i < kMaxVars / 2; ++i) {
    xs.push_back(IntPoly::variable(nv2, 2 * i));
    ys.push_back(IntPoly::variable(nv2, 2 * i + 1));
  }
  for (int i = 0; i < kMaxVars; ++i) xf.push_back(IntPoly::variable(kMaxVars, i));
  while (full->n < n) {
    int k = full->n;
    if (detail::witt_term_bound(p, k) > kMaxWittTerms)
      fail(ErrorKind::SearchSpaceTooLarge, "universal Witt polynomials for p=" + std::to_string(p) + " at index " +
                                               std::to_string(k) + " exceed the exact-size budget");
    IntPoly wx = detail::ghost_poly(p, xs, k, nv2);
    IntPoly wy = detail::ghost_poly(p, ys, k, nv2);
    full->sum.push_back(detail::solve_next(p, full->sum, wx + wy));
    full->prod.push_back(detail::solve_next(p, full->prod, wx * wy));
    full->neg.push_back(detail::solve_next(p, full->neg, -detail::ghost_poly(p, xf, k, kMaxVars)));
    if (k >= 1) {
      // F_{k-1} from w_{k-1}(F x) = w_k(x)
      full->frob.push_back(detail::solve_next(p, full->frob, detail::ghost_poly(p, xf, k, kMaxVars)));
    }
    full->n = k + 1;
  }
  auto view = std::make_shared<UniversalWittPolys>();
  view->p = p;
  view->n = n;
  view->sum.assign(full->sum.begin(), full->sum.begin() + n);
  view->prod.assign(full->prod.begin(), full->prod.begin() + n);
  view->neg.assign(full->neg.begin(), full->neg.begin() + n);
  view->frob.assign(full->frob.begin(), full->frob.begin() + (n - 1));
  cache.by_length[{p, n}] = view;
  return view;
}

/// Independent check: recompute every ghost component of the solved
/// polynomials and compare with the defining identity.
inline bool verify_ghost_identities(const UniversalWittPolys& U) {
  const int64_t p = U.p;
  std::vector<IntPoly> xs, ys, xf;
  for (int i = 0; i < kMaxVars / 2; ++i) {
    xs.push_back(IntPoly::variable(kMaxVars, 2 * i));
    ys.push_back(IntPoly::variable(kMaxVars, 2 * i + 1));
  }
  for (int i = 0; i < kMaxVars; ++i) xf.push_back(IntPoly::variable(kMaxVars, i));
  for (int k = 0; k < U.n; ++k) {
    IntPoly wx = detail::ghost_poly(p, xs, k, kMaxVars);
    IntPoly wy = detail::ghost_poly(p, ys, k, kMaxVars);
    if (!(detail::ghost_poly(p, U.sum, k, kMaxVars) == wx + wy)) return false;
    if (!(detail::ghost_poly(p, U.prod, k, kMaxVars) == wx * wy)) return false;
    if (!(detail::ghost_poly(p, U.neg, k, kMaxVars) == -detail::ghost_poly(p, xf, k, kMaxVars))) return false;
    if (k + 1 < U.n && !(detail::ghost_poly(p, U.frob, k, kMaxVars) == detail::ghost_poly(p, xf, k + 1, kMaxVars)))
      return false;
  }
  return true;
}

namespace detail {

/// Evaluate an integer polynomial on ring elements (variables beyond the
/// supplied values must not occur).
inline RingElem eval_poly(const IntPoly& P, const std::vector<RingElem>& vals, const RingPtr& R) {
  std::vector<std::vector<RingElem>> powers(vals.size());
  auto power = [&](size_t v, unsigned k) -> const RingElem& {
    auto& c = powers[v];
    if (c.empty()) c.push_back(RingElem::one(R));
    while (c.size() <= k) c.push_back(c.back() * vals[v]);
    return c[k];
  };
  RingElem acc = RingElem::zero(R);
  const bool finite = R->is_finite();
  const auto M = static_cast<unsigned long>(finite ? R->char_modulus() : 1);
  for (const auto& [m, c] : P.terms()) {
    RingElem term;
    if (finite) {
      unsigned long r = mpz_fdiv_ui(c.get_mpz_t(), M);
      if (r == 0) continue;
      term = RingElem::from_int(R, static_cast<long>(r));
    } else {
      term = RingElem::from_int(R, c);
    }
    bool zero = false;
    for (size_t v = 0; v < vals.size() && !zero; ++v) {
      if (!m.e[v]) continue;
      term = term * power(v, m.e[v]);
      zero = term.is_zero();
    }
    for (size_t v = vals.size(); v < static_cast<size_t>(kMaxVars); ++v)
      require(m.e[v] == 0, ErrorKind::IndexOutOfRange, "polynomial uses an unsupplied variable");
    if (!zero) acc += term;
  }
  return acc;
}

}  // namespace detail

class WittVec {
 public:
  WittVec() = default;
  WittVec(RingPtr R, std::vector<RingElem> coeffs) : ring_(std::move(R)), c_(std::move(coeffs)) {
    require(!c_.empty(), ErrorKind::LengthUnderflow, "Witt length must be >= 1");
    for (const auto& x : c_)
      require(x.ring() && x.ring()->same_as(*ring_), ErrorKind::MixedRings, "Witt coefficient from a different ring");
  }

  static WittVec zero(const RingPtr& R, int n) {
    require(n >= 1, ErrorKind::LengthUnderflow, "Witt length must be >= 1");
    return WittVec(R, std::vector<RingElem>(static_cast<size_t>(n), RingElem::zero(R)));
  }
  static WittVec one(const RingPtr& R, int n) {
    WittVec x = zero(R, n);
    x.c_[0] = RingElem::one(R);
    return x;
  }
  /// Teichmuller lift [r] = (r, 0, 0, ...).
  static WittVec teichmuller(const RingElem& r, int n) {
    WittVec x = zero(r.ring(), n);
    x.c_[0] = r;
    return x;
  }
  /// Image of an integer under Z -> W_n(R).
  static WittVec from_int(const RingPtr& R, int n, long c) {
    WittVec acc = zero(R, n), unit = one(R, n);
    bool neg = c < 0;
    unsigned long k = neg ? static_cast<unsigned long>(-c) : static_cast<unsigned long>(c);
    WittVec base = unit;
    while (k) {
      if (k & 1) acc = acc + base;
      k >>= 1;
      if (k) base = base + base;
    }
    return neg ? -acc : acc;
  }

  const RingPtr& ring() const { return ring_; }
  int length() const { return static_cast<int>(c_.size()); }
  int64_t p() const { return ring_->p(); }
  const std::vector<RingElem>& coeffs() const { return c_; }
  const RingElem& operator[](size_t i) const { return c_.at(i); }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  /// Membership in I_n(R) = ker w_0.
  bool in_ideal_I() const { return c_[0].is_zero(); }

  friend bool operator==(const WittVec& a, const WittVec& b) {
    a.check_compatible(b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const WittVec& a, const WittVec& b) { return !(a == b); }
  friend bool operator<(const WittVec& a, const WittVec& b) { return a.c_ < b.c_; }

  friend WittVec operator+(const WittVec& a, const WittVec& b) { return a.binary(b, &UniversalWittPolys::sum); }
  friend WittVec operator*(const WittVec& a, const WittVec& b) { return a.binary(b, &UniversalWittPolys::prod); }
  WittVec operator-() const {
    if (is_zero()) return *this;
    auto U = derive_universal_polys(p(), length());
    std::vector<RingElem> out;
    for (int k = 0; k < length(); ++k) out.push_back(detail::eval_poly(U->neg[static_cast<size_t>(k)], c_, ring_));
    return WittVec(ring_, std::move(out));
  }
  friend WittVec operator-(const WittVec& a, const WittVec& b) { return a + (-b); }
  WittVec& operator+=(const WittVec& o) { return *this = *this + o; }
  WittVec& operator*=(const WittVec& o) { return *this = *this * o; }

  /// Ghost coordinate w_k = sum_i p^i r_i^(p^(k-i)).
  RingElem ghost(int k) const {
    require(k >= 0 && k < length(), ErrorKind::IndexOutOfRange, "ghost index out of range");
    RingElem acc = RingElem::zero(ring_);
    for (int i = 0; i <= k; ++i) {
      mpz_class e = detail::mpz_pow(p(), static_cast<unsigned long>(k - i));
      acc += RingElem::from_int(ring_, detail::mpz_pow(p(), static_cast<unsigned long>(i))) * c_[static_cast<size_t>(i)].pow(e);
    }
    return acc;
  }

  /// Length-dropping Frobenius F: W_n(R) -> W_{n-1}(R).
  WittVec frobenius() const {
    require(length() >= 2, ErrorKind::LengthUnderflow, "Frobenius needs length >= 2");
    if (ring_->has_char_p()) return frobenius_char_p().truncated(length() - 1);
    auto U = derive_universal_polys(p(), length());
    std::vector<RingElem> out;
    for (int k = 0; k + 1 < length(); ++k) out.push_back(detail::eval_poly(U->frob[static_cast<size_t>(k)], c_, ring_));
    return WittVec(ring_, std::move(out));
  }

  /// Same-length Frobenius over a ring with pR = 0: (r_i) -> (r_i^p).
  WittVec frobenius_char_p() const {
    require(ring_->has_char_p(), ErrorKind::CharNotP, "same-length Frobenius needs characteristic p");
    std::vector<RingElem> out;
    for (const auto& x : c_) out.push_back(x.base_frobenius());
    return WittVec(ring_, std::move(out));
  }

  /// V: W_n(R) -> W_{n+1}(R), (r_0, ...) -> (0, r_0, ...).
  WittVec verschiebung() const {
    std::vector<RingElem> out;
    out.push_back(RingElem::zero(ring_));
    out.insert(out.end(), c_.begin(), c_.end());
    return WittVec(ring_, std::move(out));
  }

  /// V^{-1}: I_n(R) -> W_{n-1}(R), dropping the vanishing leading coordinate.
  WittVec v_inverse() const {
    require(in_ideal_I(), ErrorKind::NotInHmu, "V^{-1} needs w_0 = 0");
    require(length() >= 2, ErrorKind::LengthUnderflow, "V^{-1} needs length >= 2");
    return WittVec(ring_, std::vector<RingElem>(c_.begin() + 1, c_.end()));
  }

  /// Coordinate shift that ignores the leading coordinate; on W(a) for a
  /// square-zero ideal a this is V_a^{-1}, which kills the a-summand.
  WittVec shift_down() const {
    require(length() >= 2, ErrorKind::LengthUnderflow, "shift needs length >= 2");
    return WittVec(ring_, std::vector<RingElem>(c_.begin() + 1, c_.end()));
  }

  WittVec truncated(int m) const {
    require(m >= 1 && m <= length(), ErrorKind::LengthUnderflow, "bad truncation length");
    return WittVec(ring_, std::vector<RingElem>(c_.begin(), c_.begin() + m));
  }

  /// Zero-extend to a longer length (the coordinates beyond are set to 0).
  WittVec padded(int m) const {
    require(m >= length(), ErrorKind::LengthUnderflow, "padding cannot shorten");
    std::vector<RingElem> out = c_;
    out.resize(static_cast<size_t>(m), RingElem::zero(ring_));
    return WittVec(ring_, std::move(out));
  }

  /// Multiplicative inverse by Newton iteration y <- y(2 - xy) started at
  /// the Teichmuller lift of w_0(x)^{-1}; each step kills one more power of
  /// the ideal I when p is nilpotent.
  std::optional<WittVec> try_inv() const {
    auto u = c_[0].try_inv();
    if (!u) return std::nullopt;
    WittVec y = teichmuller(*u, length());
    const WittVec unit = one(ring_, length());
    const WittVec two = unit + unit;
    int limit = 4 * (length() + ring_->nilpotency_bound()) + 8;
    for (int it = 0; it < limit; ++it) {
      WittVec xy = *this * y;
      if (xy == unit) return y;
      y = y * (two - xy);
    }
    return std::nullopt;
  }
  WittVec inv() const {
    auto r = try_inv();
    if (!r) fail(ErrorKind::NonUnit, "Witt vector is not a unit");
    return *r;
  }
  bool is_unit() const { return try_inv().has_value(); }

  std::string to_string() const {
    std::string s = "(";
    for (size_t i = 0; i < c_.size(); ++i) s += (i ? ", " : "") + c_[i].to_string();
    return s + ")";
  }

 private:
  void check_compatible(const WittVec& o) const {
    if (ring_.get() != o.ring_.get())
      require(ring_->same_as(*o.ring_), ErrorKind::MixedRings, "Witt vectors over different rings");
    require(length() == o.length(), ErrorKind::MixedRings, "Witt vectors of different length");
  }

  WittVec binary(const WittVec& o, std::vector<IntPoly> UniversalWittPolys::*which) const {
    check_compatible(o);
    auto U = derive_universal_polys(p(), length());
    std::vector<RingElem> vals;
    vals.reserve(2 * c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
      vals.push_back(c_[i]);
      vals.push_back(o.c_[i]);
    }
    std::vector<RingElem> out;
    for (int k = 0; k < length(); ++k) out.push_back(detail::eval_poly(((*U).*which)[static_cast<size_t>(k)], vals, ring_));
    return WittVec(ring_, std::move(out));
  }

  RingPtr ring_;
  std::vector<RingElem> c_;
};

/// Outcome of the ghost-coordinate unit-ideal criterion.
struct JacobsonResult {
  bool unit_ideal = false;
  int failing_index = -1;          // first k with R w_k(A) != R
  std::vector<WittVec> witness;    // c_i with sum c_i f_i = 1
};

/// Decide whether the generators span W_n(R). On success the witness is
/// assembled level by level from f V^k([a]) == V^k([a w_k(f)]) mod V^{k+1}.
inline JacobsonResult jacobson_unit_test(const std::vector<WittVec>& gens) {
  require(!gens.empty(), ErrorKind::MalformedInput, "need at least one generator");
  const RingPtr& R = gens[0].ring();
  require(R->is_finite(), ErrorKind::Unenumerable, "unit-ideal test needs a finite ring");
  const int n = gens[0].length();
  JacobsonResult res;
  // Every finite ring here is local, so R w_k(A) = R iff some w_k(f_i) is a unit.
  std::vector<std::pair<size_t, RingElem>> unit_at(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    bool found = false;
    for (size_t i = 0; i < gens.size() && !found; ++i) {
      RingElem w = gens[i].ghost(k);
      if (w.is_unit()) {
        unit_at[static_cast<size_t>(k)] = {i, w.inv()};
        found = true;
      }
    }
    if (!found) {
      res.failing_index = k;
      return res;
    }
  }
  res.unit_ideal = true;
  res.witness.assign(gens.size(), WittVec::zero(R, n));
  const WittVec unit = WittVec::one(R, n);
  for (int k = 0; k < n; ++k) {
    WittVec acc = WittVec::zero(R, n);
    for (size_t i = 0; i < gens.size(); ++i) acc = acc + res.witness[i] * gens[i];
    WittVec residual = unit - acc;
    for (int j = 0; j < k; ++j)
      require(residual[static_cast<size_t>(j)].is_zero(), ErrorKind::IntegralityFailure, "witness residual not in V^k");
    const RingElem& s = residual[static_cast<size_t>(k)];
    if (s.is_zero()) continue;
    auto [i, winv] = unit_at[static_cast<size_t>(k)];
    // V^k([s * w_k(f_i)^{-1}]) added to c_i
    WittVec term = WittVec::teichmuller(s * winv, n - k);
    for (int j = 0; j < k; ++j) term = term.verschiebung();
    res.witness[i] = res.witness[i] + term;
  }
  WittVec acc = WittVec::zero(R, n);
  for (size_t i = 0; i < gens.size(); ++i) acc = acc + res.witness[i] * gens[i];
  require(acc == unit, ErrorKind::IntegralityFailure, "unit-ideal witness failed to verify");
  return res;
}

}  // namespace gdisp
