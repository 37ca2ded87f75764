#pragma once

// Sparse multivariate polynomials over the integers (GMP coefficients).
// Used to derive and check the universal Witt polynomials and as the payload
// of the IntegerPoly coefficient ring.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gdisp/errors.hpp"

namespace gdisp {

inline constexpr int kMaxVars = 16;

struct Mono {
  std::array<uint16_t, kMaxVars> e{};

  friend bool operator==(const Mono&, const Mono&) = default;
  friend auto operator<=>(const Mono&, const Mono&) = default;

  Mono operator*(const Mono& o) const {
    Mono r;
    for (int i = 0; i < kMaxVars; ++i) r.e[i] = static_cast<uint16_t>(e[i] + o.e[i]);
    return r;
  }
  unsigned degree() const {
    unsigned d = 0;
    for (auto x : e) d += x;
    return d;
  }
};

struct MonoHash {
  size_t operator()(const Mono& m) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (auto x : m.e) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

class IntPoly {
 public:
  using Term = std::pair<Mono, mpz_class>;

  IntPoly() = default;
  explicit IntPoly(int nvars) : nvars_(nvars) {
    require(nvars >= 0 && nvars <= kMaxVars, ErrorKind::MalformedInput, "too many polynomial variables");
  }

  static IntPoly constant(int nvars, const mpz_class& c) {
    IntPoly r(nvars);
    if (c != 0) r.terms_.emplace_back(Mono{}, c);
    return r;
  }
  static IntPoly variable(int nvars, int i) {
    require(i >= 0 && i < nvars, ErrorKind::IndexOutOfRange, "variable index");
    IntPoly r(nvars);
    Mono m;
    m.e[i] = 1;
    r.terms_.emplace_back(m, mpz_class(1));
    return r;
  }
  static IntPoly monomial(int nvars, const Mono& m, const mpz_class& c) {
    IntPoly r(nvars);
    if (c != 0) r.terms_.emplace_back(m, c);
    return r;
  }

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  unsigned max_exponent(int var) const {
    unsigned m = 0;
    for (const auto& t : terms_) m = std::max<unsigned>(m, t.first.e[var]);
    return m;
  }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Mono{}); }
  mpz_class constant_term() const {
    if (!terms_.empty() && terms_[0].first == Mono{}) return terms_[0].second;
    return 0;
  }

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.terms_ == b.terms_; }

  IntPoly operator-() const {
    IntPoly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b) { return merge(a, b, 1); }
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b) { return merge(a, b, -1); }

  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    IntPoly r(std::max(a.nvars_, b.nvars_));
    if (a.is_zero() || b.is_zero()) return r;
    if (a.terms_.size() == 1 && a.terms_[0].first == Mono{}) return b.scaled(a.terms_[0].second, r.nvars_);
    if (b.terms_.size() == 1 && b.terms_[0].first == Mono{}) return a.scaled(b.terms_[0].second, r.nvars_);
    std::unordered_map<Mono, mpz_class, MonoHash> acc;
    acc.reserve(std::min<size_t>(a.size() * b.size(), size_t(1) << 24));
    mpz_class tmp;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        auto& slot = acc[ma * mb];
        mpz_addmul(slot.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
      }
    }
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.emplace_back(m, std::move(c));
    std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  IntPoly scaled(const mpz_class& c, int nvars = -1) const {
    IntPoly r(nvars < 0 ? nvars_ : nvars);
    if (c == 0) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.second *= c;
    return r;
  }

  IntPoly pow(unsigned long k) const {
    IntPoly result = constant(nvars_, 1);
    IntPoly base = *this;
    while (k) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return result;
  }

  bool divisible_by(const mpz_class& d) const {
    for (const auto& t : terms_)
      if (!mpz_divisible_p(t.second.get_mpz_t(), d.get_mpz_t())) return false;
    return true;
  }

  IntPoly exact_div(const mpz_class& d) const {
    require(divisible_by(d), ErrorKind::IntegralityFailure, "polynomial coefficient not divisible");
    IntPoly r = *this;
    for (auto& t : r.terms_) mpz_divexact(t.second.get_mpz_t(), t.second.get_mpz_t(), d.get_mpz_t());
    return r;
  }

  /// Substitute polynomials for every variable (all in a common target ring).
  IntPoly substitute(const std::vector<IntPoly>& values, int target_nvars) const {
    return evaluate<IntPoly>(
        values, constant(target_nvars, 1),
        [&](const mpz_class& c) { return constant(target_nvars, c); },
        [](const IntPoly& a, const IntPoly& b) { return a + b; },
        [](const IntPoly& a, const IntPoly& b) { return a * b; });
  }

  /// Generic evaluation: powers are cached per variable.
  template <class T, class FromInt, class Add, class Mul>
  T evaluate(const std::vector<T>& values, const T& one, FromInt from_int, Add add, Mul mul) const {
    std::vector<std::vector<T>> powers(values.size());
    auto power = [&](size_t v, unsigned k) -> const T& {
      auto& cache = powers[v];
      if (cache.empty()) cache.push_back(one);
      while (cache.size() <= k) cache.push_back(mul(cache.back(), values[v]));
      return cache[k];
    };
    T acc = from_int(mpz_class(0));
    for (const auto& [m, c] : terms_) {
      T term = from_int(c);
      for (size_t v = 0; v < values.size(); ++v)
        if (m.e[v]) term = mul(term, power(v, m.e[v]));
      acc = add(acc, term);
    }
    return acc;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      std::string cs = c.get_str();
      bool neg = c < 0;
      if (!s.empty()) s += neg ? " - " : " + ";
      else if (neg) s += "-";
      std::string abs_c = neg ? cs.substr(1) : cs;
      std::string mono;
      for (int v = 0; v < nvars_; ++v) {
        if (!m.e[v]) continue;
        if (!mono.empty()) mono += "*";
        mono += v < static_cast<int>(names.size()) ? names[v] : "v" + std::to_string(v);
        if (m.e[v] > 1) mono += "^" + std::to_string(m.e[v]);
      }
      if (mono.empty()) s += abs_c;
      else if (abs_c == "1") s += mono;
      else s += abs_c + "*" + mono;
    }
    return s;
  }

 private:
  static IntPoly merge(const IntPoly& a, const IntPoly& b, int sign) {
    IntPoly r(std::max(a.nvars_, b.nvars_));
    r.terms_.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
        r.terms_.emplace_back(b.terms_[j].first, sign > 0 ? b.terms_[j].second : mpz_class(-b.terms_[j].second));
        ++j;
      } else {
        mpz_class c = sign > 0 ? mpz_class(a.terms_[i].second + b.terms_[j].second)
                               : mpz_class(a.terms_[i].second - b.terms_[j].second);
        if (c != 0) r.terms_.emplace_back(a.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    return r;
  }

  int nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace gdisp
