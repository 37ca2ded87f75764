#pragma once

// Chain-ring arithmetic on W_n(F_q), realised as the Galois ring GR(p^n, f):
// valuations, Witt-coordinate conversion, Smith normal form, and the
// embeddings W(F_q) -> W(F_{q^m}).

#include <algorithm>
#include <optional>
#include <vector>

#include "gdisp/errors.hpp"
#include "gdisp/matrix.hpp"
#include "gdisp/rings.hpp"
#include "gdisp/witt.hpp"

namespace gdisp {

/// p-adic valuation on a flat ring Z/p^n[x]/(g); returns the exponent n of
/// the characteristic for zero (meaning "at least n").
inline int valuation(const RingElem& x) {
  const Ring& R = *x.ring();
  require(R.is_flat(), ErrorKind::MalformedInput, "valuation needs a flat chain ring");
  int v = R.char_exponent();
  for (int64_t c : x.coeffs()) {
    if (!c) continue;
    int k = 0;
    while (c % R.p() == 0) {
      c /= R.p();
      ++k;
    }
    v = std::min(v, k);
  }
  return v;
}

inline RingElem p_power(const RingPtr& R, int k) {
  require(k >= 0, ErrorKind::MalformedInput, "negative p-power");
  return RingElem::from_int(R, detail::mpz_pow(R->p(), static_cast<unsigned long>(k)));
}

/// y with p^v y = x, where v <= valuation(x); the top v digits of y are set to 0.
inline RingElem divide_by_p_power(const RingElem& x, int v) {
  require(valuation(x) >= v, ErrorKind::IntegralityFailure, "element not divisible by the p-power");
  std::vector<int64_t> c = x.coeffs();
  int64_t pv = detail::ipow(x.ring()->p(), v);
  for (auto& a : c) a /= pv;
  return RingElem::from_coeffs(x.ring(), c);
}

/// Unit u with x = p^valuation(x) u (x nonzero).
inline RingElem unit_part(const RingElem& x) { return divide_by_p_power(x, valuation(x)); }

/// p^{-shift} * m over a chain ring.
struct ShiftedMat {
  MatR m;
  int shift = 0;
};

inline MatR sigma(const MatR& M) {
  return M.map([](const RingElem& x) { return x.sigma(); });
}

inline MatR sigma_power(const MatR& M, int k) {
  MatR r = M;
  for (int i = 0; i < k; ++i) r = sigma(r);
  return r;
}

inline int valuation(const MatR& M) {
  int v = M(0, 0).ring()->char_exponent();
  for (const auto& x : M.entries()) v = std::min(v, valuation(x));
  return v;
}

/// Teichmuller lift of a residue-field element into GR(p^n, f).
inline RingElem galois_teichmuller(const RingElem& r, const RingPtr& G) {
  require(G->kind() == RingKind::GaloisRing && r.ring()->kind() == RingKind::Fq && r.ring()->p() == G->p() &&
              r.ring()->degree() == G->degree(),
          ErrorKind::MixedRings, "Teichmuller lift between mismatched rings");
  RingElem lift = RingElem::from_coeffs(G, r.coeffs());
  return lift.pow(detail::mpz_pow(G->p(), static_cast<unsigned long>(G->degree() * (G->char_exponent() - 1))));
}

/// Reduction GR(p^n, f) -> F_q.
inline RingElem galois_residue(const RingElem& x, const RingPtr& F) { return RingElem::from_coeffs(F, x.residue()); }

/// W_n(F_q) -> GR(p^n, f): (r_0, r_1, ...) -> sum p^i [r_i^(p^-i)].
inline RingElem witt_to_galois(const WittVec& x, const RingPtr& G) {
  const RingPtr& F = x.ring();
  require(F->kind() == RingKind::Fq, ErrorKind::NotAField, "Witt vector is not over a finite field");
  require(x.length() >= G->char_exponent(), ErrorKind::LengthUnderflow, "Witt vector shorter than the Galois ring");
  const int64_t p = F->p();
  const int f = F->degree();
  RingElem acc = RingElem::zero(G);
  for (int i = 0; i < G->char_exponent(); ++i) {
    const RingElem& r = x[static_cast<size_t>(i)];
    if (r.is_zero()) continue;
    // p^-i-th root on F_q is the p^(f*i - i)-th power
    RingElem root = r.pow(detail::mpz_pow(p, static_cast<unsigned long>((f - 1) * i)));
    acc += p_power(G, i) * galois_teichmuller(root, G);
  }
  return acc;
}

/// Inverse of witt_to_galois.
inline WittVec galois_to_witt(const RingElem& x, const RingPtr& F) {
  const RingPtr& G = x.ring();
  const int n = G->char_exponent();
  const int64_t p = G->p();
  std::vector<RingElem> coords;
  RingElem cur = x;
  for (int i = 0; i < n; ++i) {
    RingElem res = galois_residue(cur, F);
    coords.push_back(res.pow(detail::mpz_pow(p, static_cast<unsigned long>(i))));
    if (i + 1 < n) cur = divide_by_p_power(cur - galois_teichmuller(res, G), 1);
  }
  return WittVec(F, coords);
}

inline MatR witt_to_galois(const MatW& M, const RingPtr& G) {
  return M.map([&](const WittVec& x) { return witt_to_galois(x, G); });
}
inline MatW galois_to_witt(const MatR& M, const RingPtr& F) {
  return M.map([&](const RingElem& x) { return galois_to_witt(x, F); });
}

/// Smith normal form L M R = diag(p^{e_1}, ..., p^{e_h}) with e_1 <= ... <= e_h;
/// e_i = n means the entry vanished at the carried precision.
struct SmithForm {
  MatR L, R;
  std::vector<int> exponents;
  int precision = 0;
};

inline SmithForm smith_normal_form(const MatR& M) {
  require(M.square(), ErrorKind::MalformedInput, "Smith form implemented for square matrices");
  const RingPtr& G = M(0, 0).ring();
  require(G->is_flat(), ErrorKind::MalformedInput, "Smith form needs a chain ring");
  const int h = M.rows(), n = G->char_exponent();
  MatR A = M, L = ring_identity(G, h), R = ring_identity(G, h);
  auto swap_rows = [&](MatR& X, int a, int b) {
    for (int j = 0; j < X.cols(); ++j) std::swap(X(a, j), X(b, j));
  };
  auto swap_cols = [&](MatR& X, int a, int b) {
    for (int i = 0; i < X.rows(); ++i) std::swap(X(i, a), X(i, b));
  };
  std::vector<int> ex;
  for (int k = 0; k < h; ++k) {
    // pivot: minimal valuation, ties broken row-major
    int best = n, pr = -1, pc = -1;
    for (int i = k; i < h; ++i)
      for (int j = k; j < h; ++j) {
        int v = valuation(A(i, j));
        if (v < best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (pr < 0) {
      for (int i = k; i < h; ++i) ex.push_back(n);
      break;
    }
    swap_rows(A, k, pr);
    swap_rows(L, k, pr);
    swap_cols(A, k, pc);
    swap_cols(R, k, pc);
    // normalise the pivot to exactly p^best
    RingElem uinv = unit_part(A(k, k)).inv();
    for (int j = 0; j < h; ++j) {
      A(k, j) = A(k, j) * uinv;
      L(k, j) = L(k, j) * uinv;
    }
    for (int i = k + 1; i < h; ++i) {
      if (A(i, k).is_zero()) continue;
      RingElem m = divide_by_p_power(A(i, k), best);
      for (int j = 0; j < h; ++j) {
        A(i, j) -= m * A(k, j);
        L(i, j) -= m * L(k, j);
      }
    }
    for (int j = k + 1; j < h; ++j) {
      if (A(k, j).is_zero()) continue;
      RingElem m = divide_by_p_power(A(k, j), best);
      for (int i = 0; i < h; ++i) {
        A(i, j) -= A(i, k) * m;
        R(i, j) -= R(i, k) * m;
      }
    }
    ex.push_back(best);
  }
  return SmithForm{L, R, ex, n};
}

/// A root in F_{q^m} of the defining polynomial of F_q, found by search; it
/// fixes the embedding F_q -> F_{q^m}.
inline RingElem field_embedding_root(const RingPtr& F, const RingPtr& E) {
  require(F->kind() == RingKind::Fq && E->kind() == RingKind::Fq && F->p() == E->p() &&
              E->degree() % F->degree() == 0,
          ErrorKind::MalformedInput, "no embedding between these fields");
  const auto& g = F->modulus();
  for (const auto& z : ring_enumerate(E)) {
    RingElem acc = RingElem::zero(E);
    for (size_t i = g.size(); i-- > 0;) acc = acc * z + RingElem::from_int(E, static_cast<long>(g[i]));
    if (acc.is_zero()) return z;
  }
  fail(ErrorKind::IntegralityFailure, "defining polynomial has no root in the extension");
}

/// Ring embedding GR(p^n, f) -> GR(p^n, f m) determined by a Teichmuller root.
class GaloisEmbedding {
 public:
  GaloisEmbedding(RingPtr small, RingPtr big) : small_(std::move(small)), big_(std::move(big)) {
    require(small_->kind() == RingKind::GaloisRing && big_->kind() == RingKind::GaloisRing &&
                small_->char_exponent() == big_->char_exponent() && small_->p() == big_->p(),
            ErrorKind::MixedRings, "Galois embedding needs matching p and length");
    auto Fs = Ring::fq(small_->p(), small_->degree());
    auto Fb = Ring::fq(big_->p(), big_->degree());
    RingElem root = field_embedding_root(Fs, Fb);
    RingElem tau = galois_teichmuller(root, big_);
    RingElem pw = RingElem::one(big_);
    for (int i = 0; i < small_->degree(); ++i) {
      powers_.push_back(pw);
      pw = pw * tau;
    }
  }
  RingElem operator()(const RingElem& x) const {
    RingElem acc = RingElem::zero(big_);
    for (size_t i = 0; i < powers_.size(); ++i)
      if (x.coeffs()[i]) acc += RingElem::from_int(big_, static_cast<long>(x.coeffs()[i])) * powers_[i];
    return acc;
  }
  MatR operator()(const MatR& M) const {
    return M.map([this](const RingElem& x) { return (*this)(x); });
  }
  const RingPtr& target() const { return big_; }

 private:
  RingPtr small_, big_;
  std::vector<RingElem> powers_;
};

/// Change of precision GR(p^n, f) -> GR(p^k, f): reduction for k <= n, the
/// canonical digit lift for k > n.
inline RingElem change_precision(const RingElem& x, const RingPtr& target) {
  std::vector<int64_t> c = x.coeffs();
  return RingElem::from_coeffs(target, c);
}
inline MatR change_precision(const MatR& M, const RingPtr& target) {
  return M.map([&](const RingElem& x) { return change_precision(x, target); });
}

}  // namespace gdisp
