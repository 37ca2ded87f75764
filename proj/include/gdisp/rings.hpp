#pragma once

// Finite commutative coefficient rings and the integer polynomial ring.
//
// Finite "flat" rings are (Z/p^m)[x]/(g) for a monic g of degree f:
//   Fq          m = 1, g the lexicographically smallest monic irreducible
//   ZmodPM      f = 1, g = x
//   GaloisRing  W_m(F_q) realised as an unramified chain ring; g is chosen so
//               that x is a Teichmuller root of unity, hence sigma(x) = x^p.
// QuotientPoly adjoins variables to a flat ring modulo a monomial ideal that
// contains a pure power of every variable, so normal forms are coefficient
// truncations on the finitely many standard monomials.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gdisp/errors.hpp"
#include "gdisp/intpoly.hpp"

namespace gdisp {

enum class RingKind { Fq, ZmodPM, GaloisRing, QuotientPoly, IntegerPoly };

inline const char* ring_kind_name(RingKind k) {
  switch (k) {
    case RingKind::Fq: return "Fq";
    case RingKind::ZmodPM: return "ZmodPM";
    case RingKind::GaloisRing: return "GR";
    case RingKind::QuotientPoly: return "Quotient";
    case RingKind::IntegerPoly: return "IntegerPoly";
  }
  return "?";
}

namespace detail {

inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline int64_t mod(__int128 a, int64_t m) {
  auto r = static_cast<int64_t>(a % m);
  return r < 0 ? r + m : r;
}

inline int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Polynomials over F_p, lowest degree first, used only for modulus selection.
using Fpoly = std::vector<int64_t>;

inline void trim(Fpoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Fpoly fp_rem(Fpoly a, const Fpoly& b, int64_t p) {
  trim(a);
  int64_t lead_inv = 1;
  for (int64_t t = 1; t < p; ++t)
    if (t * b.back() % p == 1) lead_inv = t;
  while (a.size() >= b.size()) {
    int64_t c = a.back() * lead_inv % p;
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] = mod(a[shift + i] - c * b[i], p);
    trim(a);
  }
  return a;
}

inline bool fp_irreducible(const Fpoly& g, int64_t p) {
  int f = static_cast<int>(g.size()) - 1;
  // trial division by every monic polynomial of degree 1..f/2
  for (int d = 1; 2 * d <= f; ++d) {
    int64_t count = ipow(p, d);
    for (int64_t idx = 0; idx < count; ++idx) {
      Fpoly h(d + 1, 0);
      int64_t t = idx;
      for (int i = 0; i < d; ++i) {
        h[i] = t % p;
        t /= p;
      }
      h[d] = 1;
      if (fp_rem(g, h, p).empty()) return false;
    }
  }
  return true;
}

/// Smallest monic irreducible of degree f, comparing coefficients from the
/// top degree down.
inline Fpoly smallest_irreducible(int64_t p, int f) {
  if (f == 1) return {0, 1};
  int64_t count = ipow(p, f);
  for (int64_t idx = 0; idx < count; ++idx) {
    Fpoly g(f + 1, 0);
    int64_t t = idx;
    for (int i = 0; i < f; ++i) {
      g[i] = t % p;
      t /= p;
    }
    g[f] = 1;
    if (fp_irreducible(g, p)) return g;
  }
  fail(ErrorKind::MalformedInput, "no irreducible polynomial found");
}

}  // namespace detail

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

class Ring : public std::enable_shared_from_this<Ring> {
 public:
  // ---- construction -------------------------------------------------------
  static RingPtr fq(int64_t p, int f, std::vector<int64_t> modulus = {}) {
    require(detail::is_prime(p), ErrorKind::MalformedInput, "p must be prime");
    require(f >= 1, ErrorKind::MalformedInput, "degree f must be >= 1");
    if (modulus.empty()) modulus = detail::smallest_irreducible(p, f);
    require(static_cast<int>(modulus.size()) == f + 1 && modulus.back() == 1, ErrorKind::MalformedInput,
            "modulus must be monic of degree f");
    for (auto& c : modulus) c = detail::mod(c, p);
    require(detail::fp_irreducible(modulus, p), ErrorKind::MalformedInput, "modulus is not irreducible");
    auto r = std::shared_ptr<Ring>(new Ring());
    r->kind_ = RingKind::Fq;
    r->p_ = p;
    r->m_ = 1;
    r->M_ = p;
    r->f_ = f;
    r->g_ = modulus;
    r->finish_flat();
    return r;
  }

  static RingPtr zmod(int64_t p, int m) {
    require(detail::is_prime(p), ErrorKind::MalformedInput, "p must be prime");
    require(m >= 1, ErrorKind::MalformedInput, "m must be >= 1");
    require(m * std::log2(static_cast<double>(p)) < 62, ErrorKind::MalformedInput, "p^m too large");
    auto r = std::shared_ptr<Ring>(new Ring());
    r->kind_ = RingKind::ZmodPM;
    r->p_ = p;
    r->m_ = m;
    r->M_ = detail::ipow(p, m);
    r->f_ = 1;
    r->g_ = {0, 1};
    r->finish_flat();
    return r;
  }

  /// The chain ring W_n(F_q), q = p^f.
  static RingPtr galois(int64_t p, int n, int f) {
    require(detail::is_prime(p), ErrorKind::MalformedInput, "p must be prime");
    require(n >= 1 && f >= 1, ErrorKind::MalformedInput, "n, f must be >= 1");
    require(n * std::log2(static_cast<double>(p)) < 62, ErrorKind::MalformedInput, "p^n too large");
    auto residue = detail::smallest_irreducible(p, f);
    int64_t M = detail::ipow(p, n);
    // Naive lift first, then replace it by the polynomial whose roots are the
    // Teichmuller lifts of the residue roots.
    auto naive = std::shared_ptr<Ring>(new Ring());
    naive->kind_ = RingKind::GaloisRing;
    naive->p_ = p;
    naive->m_ = n;
    naive->M_ = M;
    naive->f_ = f;
    naive->g_ = residue;
    naive->finish_flat();
    auto g = naive->teichmuller_modulus();
    auto r = std::shared_ptr<Ring>(new Ring());
    r->kind_ = RingKind::GaloisRing;
    r->p_ = p;
    r->m_ = n;
    r->M_ = M;
    r->f_ = f;
    r->g_ = g;
    r->finish_flat();
    return r;
  }

  static RingPtr quotient(RingPtr base, std::vector<std::string> vars, std::vector<Mono> relations) {
    require(base && base->is_flat(), ErrorKind::MalformedInput, "quotient base must be Fq, ZmodPM or GR");
    require(!vars.empty() && static_cast<int>(vars.size()) <= kMaxVars, ErrorKind::MalformedInput,
            "bad variable list");
    auto r = std::shared_ptr<Ring>(new Ring());
    r->kind_ = RingKind::QuotientPoly;
    r->base_ = std::move(base);
    r->p_ = r->base_->p_;
    r->m_ = r->base_->m_;
    r->M_ = r->base_->M_;
    r->f_ = r->base_->f_;
    r->vars_ = std::move(vars);
    r->relations_ = std::move(relations);
    r->finish_quotient();
    return r;
  }

  /// base[e]/(e^2)
  static RingPtr dual_numbers(RingPtr base, std::string var = "e") {
    Mono m;
    m.e[0] = 2;
    return quotient(std::move(base), {std::move(var)}, {m});
  }

  /// base[t_1..t_r]/(t_1,...,t_r)^N
  static RingPtr truncated_power_series(RingPtr base, int r, int N) {
    require(r >= 1 && N >= 1, ErrorKind::MalformedInput, "bad truncation");
    std::vector<std::string> vars;
    for (int i = 0; i < r; ++i) vars.push_back("t" + std::to_string(i + 1));
    std::vector<Mono> rels;
    std::function<void(int, int, Mono)> rec = [&](int v, int left, Mono m) {
      if (v == r - 1) {
        m.e[v] = static_cast<uint16_t>(left);
        rels.push_back(m);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        Mono mm = m;
        mm.e[v] = static_cast<uint16_t>(k);
        rec(v + 1, left - k, mm);
      }
    };
    rec(0, N, Mono{});
    return quotient(std::move(base), vars, rels);
  }

  static RingPtr integer_poly(std::vector<std::string> vars, int64_t witt_prime) {
    require(detail::is_prime(witt_prime), ErrorKind::MalformedInput, "p must be prime");
    require(static_cast<int>(vars.size()) <= kMaxVars, ErrorKind::MalformedInput, "too many variables");
    auto r = std::shared_ptr<Ring>(new Ring());
    r->kind_ = RingKind::IntegerPoly;
    r->p_ = witt_prime;
    r->vars_ = std::move(vars);
    return r;
  }

  // ---- descriptor queries -------------------------------------------------
  RingKind kind() const { return kind_; }
  int64_t p() const { return p_; }
  /// Exponent m with characteristic p^m (0 for the integer polynomial ring).
  int char_exponent() const { return kind_ == RingKind::IntegerPoly ? 0 : m_; }
  int64_t char_modulus() const { return M_; }
  int degree() const { return f_; }
  const std::vector<int64_t>& modulus() const { return g_; }
  const RingPtr& base() const { return base_; }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Mono>& relations() const { return relations_; }
  const std::vector<Mono>& standard_monomials() const { return std_; }

  bool is_flat() const {
    return kind_ == RingKind::Fq || kind_ == RingKind::ZmodPM || kind_ == RingKind::GaloisRing;
  }
  bool is_finite() const { return kind_ != RingKind::IntegerPoly; }
  bool is_field() const { return kind_ == RingKind::Fq || (is_flat() && m_ == 1); }
  bool has_char_p() const { return is_finite() && m_ == 1; }
  /// Number of int64 slots in an element payload.
  size_t width() const { return kind_ == RingKind::QuotientPoly ? std_.size() * f_ : static_cast<size_t>(f_); }

  /// Cardinality as p-adic exponent: |R| = p^log_card.
  int64_t log_card() const { return static_cast<int64_t>(width()) * m_; }

  /// Bound e such that every nilpotent x satisfies x^e = 0.
  int nilpotency_bound() const {
    if (kind_ == RingKind::IntegerPoly) return 1;
    int e = m_;
    if (kind_ == RingKind::QuotientPoly)
      for (auto k : maxpow_) e += k - 1;
    return e;
  }

  bool same_as(const Ring& o) const {
    if (this == &o) return true;
    if (kind_ != o.kind_ || p_ != o.p_ || m_ != o.m_ || f_ != o.f_ || g_ != o.g_ || vars_ != o.vars_ ||
        relations_ != o.relations_)
      return false;
    if (base_ || o.base_) return base_ && o.base_ && base_->same_as(*o.base_);
    return true;
  }

  // ---- flat-ring arithmetic on payload slices -----------------------------
  void flat_add(const int64_t* a, const int64_t* b, int64_t* out) const {
    for (int i = 0; i < f_; ++i) {
      int64_t s = a[i] + b[i];
      out[i] = s >= M_ ? s - M_ : s;
    }
  }
  void flat_sub(const int64_t* a, const int64_t* b, int64_t* out) const {
    for (int i = 0; i < f_; ++i) {
      int64_t s = a[i] - b[i];
      out[i] = s < 0 ? s + M_ : s;
    }
  }
  /// out += a*b
  void flat_mul_acc(const int64_t* a, const int64_t* b, int64_t* out) const {
    if (f_ == 1) {
      out[0] = detail::mod(static_cast<__int128>(a[0]) * b[0] + out[0], M_);
      return;
    }
    __int128 prod[2 * 8];
    std::vector<__int128> big;
    __int128* pr = prod;
    if (2 * f_ > 16) {
      big.assign(2 * f_, 0);
      pr = big.data();
    } else {
      std::fill(prod, prod + 2 * f_, 0);
    }
    for (int i = 0; i < f_; ++i) {
      if (!a[i]) continue;
      for (int j = 0; j < f_; ++j) pr[i + j] = (pr[i + j] + static_cast<__int128>(a[i]) * b[j]) % M_;
    }
    for (int k = 2 * f_ - 2; k >= f_; --k) {
      __int128 c = pr[k] % M_;
      if (!c) continue;
      for (int i = 0; i < f_; ++i) pr[k - f_ + i] = (pr[k - f_ + i] - c * g_[i]) % M_;
      pr[k] = 0;
    }
    for (int i = 0; i < f_; ++i) out[i] = detail::mod(pr[i] + out[i], M_);
  }

  // ---- quotient-ring structure -------------------------------------------
  /// product table: index of std_[i]*std_[j] or -1 if it lies in the ideal.
  int mono_product(size_t i, size_t j) const { return table_[i * std_.size() + j]; }

  /// Galois ring only: x^(p*i) for i < f, used to apply sigma.
  const std::vector<std::vector<int64_t>>& frobenius_images() const { return frob_images_; }

 private:
  Ring() = default;

  void finish_flat() {
    // sigma(x^i) = x^(p*i); only meaningful when x is a Teichmuller root.
    frob_images_.clear();
    if (f_ == 1) {
      frob_images_.push_back({1});
      return;
    }
    std::vector<int64_t> x(f_, 0);
    x[1] = 1;
    std::vector<int64_t> xp = flat_pow(x, static_cast<uint64_t>(p_));
    std::vector<int64_t> cur(f_, 0);
    cur[0] = 1;
    for (int i = 0; i < f_; ++i) {
      frob_images_.push_back(cur);
      std::vector<int64_t> nxt(f_, 0);
      flat_mul_acc(cur.data(), xp.data(), nxt.data());
      cur = nxt;
    }
  }

  std::vector<int64_t> flat_pow(std::vector<int64_t> b, uint64_t e) const {
    std::vector<int64_t> r(f_, 0);
    r[0] = 1 % M_;
    while (e) {
      if (e & 1) {
        std::vector<int64_t> t(f_, 0);
        flat_mul_acc(r.data(), b.data(), t.data());
        r = t;
      }
      e >>= 1;
      if (e) {
        std::vector<int64_t> t(f_, 0);
        flat_mul_acc(b.data(), b.data(), t.data());
        b = t;
      }
    }
    return r;
  }

  /// In the naive Galois ring: prod_{i<f} (X - tau^{p^i}) with tau the
  /// Teichmuller lift of x; its coefficients are constants.
  std::vector<int64_t> teichmuller_modulus() const {
    if (f_ == 1) return {0, 1};
    std::vector<int64_t> x(f_, 0);
    x[1] = 1;
    uint64_t q = static_cast<uint64_t>(detail::ipow(p_, f_));
    std::vector<int64_t> tau = x;
    for (int k = 0; k + 1 < m_; ++k) tau = flat_pow(tau, q);
    // poly in X with coefficients in the naive ring, lowest first
    std::vector<std::vector<int64_t>> poly{std::vector<int64_t>(f_, 0)};
    poly[0][0] = 1;
    std::vector<int64_t> root = tau;
    for (int i = 0; i < f_; ++i) {
      std::vector<std::vector<int64_t>> next(poly.size() + 1, std::vector<int64_t>(f_, 0));
      for (size_t k = 0; k < poly.size(); ++k) {
        // X * poly[k]
        flat_add(next[k + 1].data(), poly[k].data(), next[k + 1].data());
        // -root * poly[k]
        std::vector<int64_t> t(f_, 0);
        flat_mul_acc(poly[k].data(), root.data(), t.data());
        flat_sub(next[k].data(), t.data(), next[k].data());
      }
      poly = next;
      root = flat_pow(root, static_cast<uint64_t>(p_));
    }
    std::vector<int64_t> g;
    for (auto& c : poly) {
      for (int i = 1; i < f_; ++i)
        require(c[i] == 0, ErrorKind::IntegralityFailure, "Teichmuller modulus has non-constant coefficient");
      g.push_back(c[0]);
    }
    return g;
  }

  void finish_quotient() {
    int nv = static_cast<int>(vars_.size());
    maxpow_.assign(nv, 0);
    for (const auto& r : relations_) {
      int nonzero = 0, which = -1;
      for (int v = 0; v < kMaxVars; ++v)
        if (r.e[v]) {
          require(v < nv, ErrorKind::MalformedInput, "relation uses undeclared variable");
          ++nonzero;
          which = v;
        }
      require(nonzero > 0, ErrorKind::MalformedInput, "relation 1 would give the zero ring");
      if (nonzero == 1) {
        int k = r.e[which];
        if (maxpow_[which] == 0 || k < maxpow_[which]) maxpow_[which] = k;
      }
    }
    for (int v = 0; v < nv; ++v)
      require(maxpow_[v] > 0, ErrorKind::Unenumerable, "variable " + vars_[v] + " is not nilpotent in the quotient");
    auto in_ideal = [&](const Mono& m) {
      for (const auto& r : relations_) {
        bool div = true;
        for (int v = 0; v < nv && div; ++v) div = m.e[v] >= r.e[v];
        if (div) return true;
      }
      return false;
    };
    // standard monomials in graded-lex order
    std::vector<Mono> all;
    std::function<void(int, Mono)> rec = [&](int v, Mono m) {
      if (v == nv) {
        if (!in_ideal(m)) all.push_back(m);
        return;
      }
      for (int k = 0; k < maxpow_[v]; ++k) {
        Mono mm = m;
        mm.e[v] = static_cast<uint16_t>(k);
        rec(v + 1, mm);
      }
    };
    rec(0, Mono{});
    std::stable_sort(all.begin(), all.end(), [](const Mono& a, const Mono& b) {
      if (a.degree() != b.degree()) return a.degree() < b.degree();
      return a > b;
    });
    std_ = all;
    std::map<Mono, int> index;
    for (size_t i = 0; i < std_.size(); ++i) index[std_[i]] = static_cast<int>(i);
    table_.assign(std_.size() * std_.size(), -1);
    for (size_t i = 0; i < std_.size(); ++i)
      for (size_t j = 0; j < std_.size(); ++j) {
        auto it = index.find(std_[i] * std_[j]);
        table_[i * std_.size() + j] = it == index.end() ? -1 : it->second;
      }
  }

  RingKind kind_ = RingKind::Fq;
  int64_t p_ = 2;
  int m_ = 1;
  int64_t M_ = 2;
  int f_ = 1;
  std::vector<int64_t> g_;
  RingPtr base_;
  std::vector<std::string> vars_;
  std::vector<Mono> relations_;
  std::vector<int> maxpow_;
  std::vector<Mono> std_;
  std::vector<int> table_;
  std::vector<std::vector<int64_t>> frob_images_;
};

/// An element of a coefficient ring in canonical form.
class RingElem {
 public:
  RingElem() = default;

  static RingElem zero(const RingPtr& R) {
    RingElem x;
    x.ring_ = R;
    if (R->is_finite()) x.d_.assign(R->width(), 0);
    else x.poly_ = IntPoly(static_cast<int>(R->vars().size()));
    return x;
  }
  static RingElem from_int(const RingPtr& R, const mpz_class& c) {
    RingElem x = zero(R);
    if (R->is_finite()) {
      mpz_class r = c % R->char_modulus();
      if (r < 0) r += R->char_modulus();
      x.d_[0] = r.get_si();
    } else {
      x.poly_ = IntPoly::constant(static_cast<int>(R->vars().size()), c);
    }
    return x;
  }
  static RingElem from_int(const RingPtr& R, long c) { return from_int(R, mpz_class(c)); }
  static RingElem one(const RingPtr& R) { return from_int(R, 1L); }

  /// Payload given lowest slot first; values are reduced.
  static RingElem from_coeffs(const RingPtr& R, const std::vector<int64_t>& c) {
    require(R->is_finite(), ErrorKind::MalformedInput, "coefficient payload on an infinite ring");
    require(c.size() <= R->width(), ErrorKind::MalformedInput, "too many coefficients for ring element");
    RingElem x = zero(R);
    for (size_t i = 0; i < c.size(); ++i) x.d_[i] = detail::mod(c[i], R->char_modulus());
    return x;
  }
  static RingElem from_poly(const RingPtr& R, IntPoly p) {
    require(R->kind() == RingKind::IntegerPoly, ErrorKind::MalformedInput, "polynomial payload needs IntegerPoly");
    RingElem x;
    x.ring_ = R;
    x.poly_ = std::move(p);
    return x;
  }
  /// Generator of a quotient or integer polynomial ring.
  static RingElem variable(const RingPtr& R, int v) {
    if (R->kind() == RingKind::IntegerPoly)
      return from_poly(R, IntPoly::variable(static_cast<int>(R->vars().size()), v));
    require(R->kind() == RingKind::QuotientPoly, ErrorKind::MalformedInput, "ring has no variables");
    Mono m;
    m.e[v] = 1;
    RingElem x = zero(R);
    const auto& stdm = R->standard_monomials();
    for (size_t i = 0; i < stdm.size(); ++i)
      if (stdm[i] == m) x.d_[i * R->degree()] = 1;
    return x;
  }
  /// Flat ring: the class of x (the generator over Z/p^m).
  static RingElem generator(const RingPtr& R) {
    require(R->is_flat(), ErrorKind::MalformedInput, "generator() needs a flat ring");
    RingElem x = zero(R);
    if (R->degree() > 1) x.d_[1] = 1;
    return x;
  }

  const RingPtr& ring() const { return ring_; }
  const std::vector<int64_t>& coeffs() const { return d_; }
  const IntPoly& poly() const { return poly_; }

  bool is_zero() const {
    if (ring_->is_finite())
      return std::all_of(d_.begin(), d_.end(), [](int64_t v) { return v == 0; });
    return poly_.is_zero();
  }
  bool is_one() const { return *this == one(ring_); }

  friend bool operator==(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    return a.d_ == b.d_ && a.poly_ == b.poly_;
  }
  friend bool operator!=(const RingElem& a, const RingElem& b) { return !(a == b); }
  /// Payload order used for canonical sorting.
  friend bool operator<(const RingElem& a, const RingElem& b) { return a.d_ < b.d_; }

  friend RingElem operator+(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    RingElem r = a;
    if (!a.ring_->is_finite()) {
      r.poly_ = a.poly_ + b.poly_;
      return r;
    }
    const Ring& R = *a.ring_;
    size_t f = static_cast<size_t>(R.degree());
    for (size_t i = 0; i < r.d_.size(); i += f) R.flat_add(&a.d_[i], &b.d_[i], &r.d_[i]);
    return r;
  }
  friend RingElem operator-(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    RingElem r = a;
    if (!a.ring_->is_finite()) {
      r.poly_ = a.poly_ - b.poly_;
      return r;
    }
    const Ring& R = *a.ring_;
    size_t f = static_cast<size_t>(R.degree());
    for (size_t i = 0; i < r.d_.size(); i += f) R.flat_sub(&a.d_[i], &b.d_[i], &r.d_[i]);
    return r;
  }
  RingElem operator-() const { return zero(ring_) - *this; }

  friend RingElem operator*(const RingElem& a, const RingElem& b) {
    a.check_same(b);
    const Ring& R = *a.ring_;
    if (!R.is_finite()) return from_poly(a.ring_, a.poly_ * b.poly_);
    RingElem r = zero(a.ring_);
    if (R.is_flat()) {
      R.flat_mul_acc(a.d_.data(), b.d_.data(), r.d_.data());
      return r;
    }
    const Ring& B = *R.base();
    size_t f = static_cast<size_t>(R.degree());
    size_t ns = R.standard_monomials().size();
    for (size_t i = 0; i < ns; ++i) {
      const int64_t* ai = &a.d_[i * f];
      if (std::all_of(ai, ai + f, [](int64_t v) { return v == 0; })) continue;
      for (size_t j = 0; j < ns; ++j) {
        int k = R.mono_product(i, j);
        if (k < 0) continue;
        B.flat_mul_acc(ai, &b.d_[j * f], &r.d_[static_cast<size_t>(k) * f]);
      }
    }
    return r;
  }
  RingElem& operator+=(const RingElem& o) { return *this = *this + o; }
  RingElem& operator-=(const RingElem& o) { return *this = *this - o; }
  RingElem& operator*=(const RingElem& o) { return *this = *this * o; }

  RingElem pow(const mpz_class& e) const {
    require(e >= 0, ErrorKind::MalformedInput, "negative exponent");
    RingElem r = one(ring_), b = *this;
    mpz_class k = e;
    while (k > 0) {
      if (mpz_odd_p(k.get_mpz_t())) r *= b;
      k >>= 1;
      if (k > 0) b *= b;
    }
    return r;
  }
  RingElem pow(unsigned long e) const { return pow(mpz_class(e)); }

  /// Residue modulo the maximal ideal of a local finite ring, as an element of
  /// the flat residue field payload (length f, entries mod p).
  std::vector<int64_t> residue() const {
    require(ring_->is_finite(), ErrorKind::Unenumerable, "residue on infinite ring");
    size_t f = static_cast<size_t>(ring_->degree());
    std::vector<int64_t> r(d_.begin(), d_.begin() + static_cast<long>(f));
    for (auto& v : r) v %= ring_->p();
    return r;
  }

  bool is_unit() const {
    if (!ring_->is_finite()) return poly_.is_constant() && (poly_.constant_term() == 1 || poly_.constant_term() == -1);
    auto r = residue();
    return std::any_of(r.begin(), r.end(), [](int64_t v) { return v != 0; });
  }

  bool is_nilpotent() const {
    if (!ring_->is_finite()) return is_zero();
    return pow(static_cast<unsigned long>(ring_->nilpotency_bound())).is_zero();
  }

  std::optional<RingElem> try_inv() const {
    if (!is_unit()) return std::nullopt;
    if (!ring_->is_finite()) return from_poly(ring_, poly_);  // +-1 is its own inverse
    // residue-field inverse: u^(q-2) computed in the ring, then Newton lifting
    // x <- x(2 - a x) which doubles the precision each step.
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(ring_->p()), static_cast<unsigned long>(ring_->degree()));
    RingElem x = pow(q - 2);
    RingElem two = from_int(ring_, 2L);
    int steps = 1;
    for (int prec = 1; prec < 2 * ring_->nilpotency_bound() + 2; prec *= 2) ++steps;
    for (int s = 0; s < steps + 1; ++s) x = x * (two - *this * x);
    require((*this * x).is_one(), ErrorKind::NonUnit, "inverse did not converge");
    return x;
  }
  RingElem inv() const {
    auto r = try_inv();
    if (!r) fail(ErrorKind::NonUnit, "element is not a unit");
    return *r;
  }

  /// x -> x^p, a ring endomorphism when p = 0 in the ring.
  RingElem base_frobenius() const {
    require(ring_->has_char_p(), ErrorKind::CharNotP, "base Frobenius needs characteristic p");
    return pow(static_cast<unsigned long>(ring_->p()));
  }

  /// Galois-ring Frobenius automorphism (the Witt vector sigma of W_n(F_q)),
  /// also valid on Fq. Needs the Teichmuller modulus set up by Ring::galois.
  RingElem sigma() const {
    require(ring_->kind() == RingKind::GaloisRing || ring_->kind() == RingKind::Fq, ErrorKind::NotAField,
            "sigma needs a Galois ring or a finite field");
    if (ring_->degree() == 1) return *this;
    if (ring_->kind() == RingKind::Fq) return pow(static_cast<unsigned long>(ring_->p()));
    RingElem r = zero(ring_);
    const auto& img = ring_->frobenius_images();
    for (int i = 0; i < ring_->degree(); ++i) {
      if (!d_[i]) continue;
      RingElem c = from_int(ring_, static_cast<long>(d_[i]));
      RingElem xi = from_coeffs(ring_, img[static_cast<size_t>(i)]);
      r += c * xi;
    }
    return r;
  }

  std::string to_string() const {
    if (!ring_->is_finite()) {
      return poly_.to_string(ring_->vars());
    }
    std::string s = "[";
    for (size_t i = 0; i < d_.size(); ++i) s += (i ? "," : "") + std::to_string(d_[i]);
    return s + "]";
  }

 private:
  void check_same(const RingElem& o) const {
    if (ring_.get() != o.ring_.get())
      require(ring_ && o.ring_ && ring_->same_as(*o.ring_), ErrorKind::MixedRings, "operands from different rings");
  }

  RingPtr ring_;
  std::vector<int64_t> d_;
  IntPoly poly_;
};

/// Number of elements, when it fits in 63 bits.
inline uint64_t ring_cardinality(const Ring& R) {
  require(R.is_finite(), ErrorKind::Unenumerable, "IntegerPoly cannot be enumerated");
  long double bits = static_cast<long double>(R.log_card()) * std::log2(static_cast<long double>(R.p()));
  require(bits < 62, ErrorKind::SearchSpaceTooLarge, "ring too large to enumerate");
  uint64_t c = 1;
  for (int64_t i = 0; i < R.log_card(); ++i) c *= static_cast<uint64_t>(R.p());
  return c;
}

/// Element with the given index in the fixed enumeration order: the payload
/// read as base-p^m digits, slot 0 least significant.
inline RingElem ring_element_at(const RingPtr& R, uint64_t index) {
  RingElem x = RingElem::zero(R);
  std::vector<int64_t> c(R->width());
  auto M = static_cast<uint64_t>(R->char_modulus());
  for (auto& v : c) {
    v = static_cast<int64_t>(index % M);
    index /= M;
  }
  return RingElem::from_coeffs(R, c);
}

inline uint64_t ring_index_of(const RingElem& x) {
  auto M = static_cast<uint64_t>(x.ring()->char_modulus());
  uint64_t idx = 0;
  const auto& c = x.coeffs();
  for (size_t i = c.size(); i-- > 0;) idx = idx * M + static_cast<uint64_t>(c[i]);
  return idx;
}

inline std::vector<RingElem> ring_enumerate(const RingPtr& R) {
  uint64_t n = ring_cardinality(*R);
  std::vector<RingElem> out;
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) out.push_back(ring_element_at(R, i));
  return out;
}

/// Canonical ring map Z/p^m -> R on an integer.
inline RingElem ring_int(const RingPtr& R, long c) { return RingElem::from_int(R, c); }

}  // namespace gdisp
