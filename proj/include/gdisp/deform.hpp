#pragma once

// Deformations of banal displays along a square-zero ideal a of a finite
// ring A of characteristic p. With a^2 = 0 the Witt vectors W(a) add
// coordinatewise (these are the logarithmic coordinates), F vanishes on them,
// and exp(X) = 1 + X.
//
// Psi_a is the divided Frobenius at fixed Witt length with V^{-1} padded by a
// zero top digit; all identities below hold exactly in that model.

#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "gdisp/display.hpp"
#include "gdisp/errors.hpp"
#include "gdisp/group.hpp"
#include "gdisp/witt.hpp"

namespace gdisp {

/// A = base[vars]/(monomials) with a generated by some of the variables.
class SquareZeroData {
 public:
  /// base[e]/(e^2), a = (e).
  static SquareZeroData dual_numbers(const RingPtr& base) {
    return SquareZeroData(Ring::dual_numbers(base), std::vector<int>{0});
  }

  SquareZeroData(RingPtr A, std::vector<int> gen_vars) : A_(std::move(A)), gens_(std::move(gen_vars)) {
    require(A_->has_char_p(), ErrorKind::CharNotP, "square-zero deformations are implemented for pA = 0");
    if (A_->kind() != RingKind::QuotientPoly) {
      require(gens_.empty(), ErrorKind::MalformedInput, "ideal generators must be variables of a monomial quotient");
      Abar_ = A_;
      to_bar_.emplace_back(0, 0);
      return;
    }
    for (int a : gens_)
      require(a >= 0 && a < static_cast<int>(A_->vars().size()), ErrorKind::IndexOutOfRange, "no such variable");
    for (int a : gens_)
      for (int b : gens_)
        require((RingElem::variable(A_, a) * RingElem::variable(A_, b)).is_zero(), ErrorKind::MalformedInput,
                "ideal generators do not square to zero");
    const auto& stdm = A_->standard_monomials();
    std::vector<std::string> keep_vars;
    std::vector<int> var_map(A_->vars().size(), -1);
    for (size_t v = 0; v < A_->vars().size(); ++v)
      if (std::find(gens_.begin(), gens_.end(), static_cast<int>(v)) == gens_.end()) {
        var_map[v] = static_cast<int>(keep_vars.size());
        keep_vars.push_back(A_->vars()[v]);
      }
    auto in_ideal = [&](const Mono& m) {
      for (int g : gens_)
        if (m.e[static_cast<size_t>(g)]) return true;
      return false;
    };
    // A/a: the base itself, or the quotient by the surviving relations
    std::vector<Mono> rels;
    if (!keep_vars.empty()) {
      for (const auto& r : A_->relations()) {
        if (in_ideal(r)) continue;
        Mono m;
        for (size_t v = 0; v < var_map.size(); ++v)
          if (var_map[v] >= 0) m.e[static_cast<size_t>(var_map[v])] = r.e[v];
        rels.push_back(m);
      }
      Abar_ = Ring::quotient(A_->base(), keep_vars, rels);
    } else {
      Abar_ = A_->base();
    }
    for (size_t i = 0; i < stdm.size(); ++i) {
      if (in_ideal(stdm[i])) {
        ideal_monos_.push_back(i);
        continue;
      }
      Mono m;
      for (size_t v = 0; v < var_map.size(); ++v)
        if (var_map[v] >= 0) m.e[static_cast<size_t>(var_map[v])] = stdm[i].e[v];
      size_t target = 0;
      if (Abar_->kind() == RingKind::QuotientPoly) {
        const auto& bm = Abar_->standard_monomials();
        target = static_cast<size_t>(std::find(bm.begin(), bm.end(), m) - bm.begin());
        require(target < bm.size(), ErrorKind::MalformedInput, "monomial missing from the quotient");
      }
      to_bar_.emplace_back(i, target);
    }
  }

  const RingPtr& A() const { return A_; }
  const RingPtr& Abar() const { return Abar_; }

  RingElem reduce(const RingElem& x) const {
    const size_t f = static_cast<size_t>(A_->degree());
    std::vector<int64_t> out(Abar_->width(), 0);
    for (auto [i, j] : to_bar_)
      for (size_t c = 0; c < f; ++c) out[j * f + c] = x.coeffs()[i * f + c];
    return RingElem::from_coeffs(Abar_, out);
  }

  /// The section A/a -> A sending standard monomials to themselves.
  RingElem lift(const RingElem& x) const {
    const size_t f = static_cast<size_t>(A_->degree());
    std::vector<int64_t> out(A_->width(), 0);
    for (auto [i, j] : to_bar_)
      for (size_t c = 0; c < f; ++c) out[i * f + c] = x.coeffs()[j * f + c];
    return RingElem::from_coeffs(A_, out);
  }

  bool in_ideal(const RingElem& x) const { return reduce(x).is_zero(); }

  /// All elements of a, in a fixed order.
  std::vector<RingElem> ideal_elements() const {
    std::vector<RingElem> out{RingElem::zero(A_)};
    if (ideal_monos_.empty()) return out;
    const size_t f = static_cast<size_t>(A_->degree());
    const auto base_elems = ring_enumerate(A_->base());
    for (size_t mono : ideal_monos_) {
      std::vector<RingElem> next;
      for (const auto& x : out)
        for (const auto& c : base_elems) {
          std::vector<int64_t> d = x.coeffs();
          for (size_t k = 0; k < f; ++k) d[mono * f + k] = c.coeffs()[k];
          next.push_back(RingElem::from_coeffs(A_, d));
        }
      out = std::move(next);
    }
    return out;
  }

  /// An F_p-basis of a.
  std::vector<RingElem> ideal_basis() const {
    const size_t f = static_cast<size_t>(A_->degree());
    std::vector<RingElem> out;
    for (size_t mono : ideal_monos_)
      for (size_t k = 0; k < f; ++k) {
        std::vector<int64_t> d(A_->width(), 0);
        d[mono * f + k] = 1;
        out.push_back(RingElem::from_coeffs(A_, d));
      }
    return out;
  }

  WittVec reduce(const WittVec& x) const {
    std::vector<RingElem> c;
    for (const auto& y : x.coeffs()) c.push_back(reduce(y));
    return WittVec(Abar_, c);
  }
  WittVec lift(const WittVec& x) const {
    std::vector<RingElem> c;
    for (const auto& y : x.coeffs()) c.push_back(lift(y));
    return WittVec(A_, c);
  }
  MatW reduce(const MatW& M) const {
    return M.map([this](const WittVec& x) { return reduce(x); });
  }
  MatW lift(const MatW& M) const {
    return M.map([this](const WittVec& x) { return lift(x); });
  }
  bool in_witt_ideal(const WittVec& x) const {
    for (const auto& c : x.coeffs())
      if (!in_ideal(c)) return false;
    return true;
  }

 private:
  RingPtr A_, Abar_;
  std::vector<int> gens_;
  std::vector<size_t> ideal_monos_;
  std::vector<std::pair<size_t, size_t>> to_bar_;
};

/// Psi_a entrywise: V_a^{-1} on u^- entries (zero on the a-summand, shift on
/// I(A)), F on weight 0, pF on weight 1. The u^- entries need w_0 in a.
inline MatW psi_a(const MatW& X, const GroupSpec& spec, const SquareZeroData& data) {
  require(X.rows() == spec.h && X.square(), ErrorKind::MalformedInput, "matrix size does not match the group");
  for (auto [i, j] : spec.u_minus_positions())
    require(data.in_ideal(X(i, j)[0]), ErrorKind::BadDecomposition,
            "u^- entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not in I_a(A)");
  return divided_frobenius_entries(X, spec, FrobMode::Padded);
}

/// h^{-1} U Psi_a(h).
inline MatW psi_conjugate(const MatW& U, const MatW& h, const GroupSpec& spec, const SquareZeroData& data) {
  return inverse(h) * U * psi_a(h, spec, data);
}

struct GmzcfResult {
  MatW h;
  int iterations = 0;
};

/// The unique h in G(W(a)) with U' = h^{-1} U Psi_a(h), as the fixed point of
/// X -> (U - U') U^{-1} + U Psi_a(X) U^{-1} started at X = 0.
inline GmzcfResult gmzcf_solve(const MatW& U, const MatW& Uprime, const SquareZeroData& data, const GroupSpec& spec) {
  require(U(0, 0).ring()->same_as(*data.A()) && Uprime(0, 0).ring()->same_as(*data.A()), ErrorKind::MixedRings,
          "displays must live over A");
  require(data.reduce(U) == data.reduce(Uprime), ErrorKind::NotCongruent, "U and U' differ modulo W(a)");
  require(is_adjoint_nilpotent(Display{spec, U}) && is_adjoint_nilpotent(Display{spec, Uprime}),
          ErrorKind::NotAdjointNilpotent, "U is not adjoint nilpotent");
  const int n = U(0, 0).length();
  const int bound = spec.lie_dim() * n;
  MatW Uinv = inverse(U);
  MatW C = (U - Uprime) * Uinv;
  MatW X = MatW::zero_like(U);
  int it = 0;
  for (;;) {
    MatW next = C + U * divided_frobenius_entries(X, spec, FrobMode::Padded) * Uinv;
    ++it;
    if (next == X) break;
    if (it > bound)
      fail(ErrorKind::NotAdjointNilpotent, "fixed-point iteration did not stabilise within " + std::to_string(bound) +
                                               " steps; last iterate " + next.to_string());
    X = next;
  }
  MatW h = witt_identity(data.A(), spec.h, n) + X;
  require(psi_conjugate(U, h, spec, data) == Uprime, ErrorKind::IntegralityFailure, "fixed point fails verification");
  return GmzcfResult{h, it - 1};
}

struct LiftClass {
  Display D;
  std::vector<RingElem> tangent;  // the a-values on the u^- positions
};

/// Representatives (1 - sum [a_ij] E_ij) U of the lifts of U0, one per class,
/// indexed by a (x) u^-. `base_lift` defaults to the monomial section.
inline std::vector<LiftClass> enumerate_lifts(const MatW& U0, const SquareZeroData& data, const GroupSpec& spec,
                                              std::optional<MatW> base_lift = std::nullopt) {
  require(data.A()->is_finite(), ErrorKind::Unenumerable, "A is not finite");
  require(is_adjoint_nilpotent(Display{spec, U0}), ErrorKind::NotAdjointNilpotent, "U0 is not adjoint nilpotent");
  MatW U = base_lift.value_or(data.lift(U0));
  require(data.reduce(U) == U0, ErrorKind::NotCongruent, "base lift does not reduce to U0");
  const int n = U(0, 0).length();
  auto pos = spec.u_minus_positions();
  auto elems = data.ideal_elements();
  std::vector<LiftClass> out;
  std::vector<size_t> idx(pos.size(), 0);
  for (;;) {
    MatW g = witt_identity(data.A(), spec.h, n);
    std::vector<RingElem> tangent;
    for (size_t k = 0; k < pos.size(); ++k) {
      const RingElem& a = elems[idx[k]];
      tangent.push_back(a);
      g(pos[k].first, pos[k].second) = -WittVec::teichmuller(a, n);
    }
    out.push_back(LiftClass{Display{spec, g * U}, tangent});
    size_t k = 0;
    while (k < idx.size() && ++idx[k] == elems.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

/// Independent classification of all lifts U + Y, Y in M_h(W_n(a)), under
/// H^mu(a) = 1 + {X in M_h(W_n(a)) : u^- entries have w_0 = 0}. Generators
/// act by translation; the translations are computed from the exact action
/// and checked to be independent of Y.
class LiftOracle {
 public:
  LiftOracle(const MatW& U, const SquareZeroData& data, const GroupSpec& spec, uint64_t seed = 1,
             long double bound = 1e7)
      : U_(U), data_(data), spec_(spec), n_(U(0, 0).length()), elems_(data.ideal_elements()) {
    const int h = spec.h;
    slots_ = static_cast<size_t>(h * h * n_);
    require(std::pow(static_cast<long double>(elems_.size()), slots_) <= bound, ErrorKind::SearchSpaceTooLarge,
            "lift space exceeds the search bound");
    for (size_t i = 0; i < elems_.size(); ++i) elem_index_.emplace(elems_[i].coeffs(), i);
    total_ = 1;
    for (size_t s = 0; s < slots_; ++s) total_ *= elems_.size();

    // generators of H^mu(a): single Witt digit, single F_p-basis element of a
    const auto basis = data.ideal_basis();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        for (int c = 0; c < n_; ++c) {
          if (c == 0 && spec.weight(i, j) == -1) continue;
          for (const auto& e : basis) {
            MatW X = MatW::zero_like(U);
            std::vector<RingElem> digits(static_cast<size_t>(n_), RingElem::zero(data.A()));
            digits[static_cast<size_t>(c)] = e;
            X(i, j) = WittVec(data.A(), digits);
            MatW g = witt_identity(data.A(), h, n_) + X;
            std::vector<size_t> delta;
            for (int trial = 0; trial < 4; ++trial) {
              uint64_t y = trial == 0 ? 0 : rng() % total_;
              MatW L = U_ + decode(y);
              MatW moved = psi_conjugate(L, g, spec, data);
              std::vector<size_t> d = digits_of(moved - L);
              if (trial == 0) {
                delta = d;
              } else {
                require(d == delta, ErrorKind::IntegralityFailure, "H^mu(a) does not act by translation");
              }
            }
            deltas_.push_back(delta);
          }
        }
    // union-find over all Y
    parent_.resize(total_);
    std::iota(parent_.begin(), parent_.end(), 0);
    for (uint64_t y = 0; y < total_; ++y) {
      auto dy = digits_from_index(y);
      for (const auto& d : deltas_) unite(y, index_from_digits(add(dy, d)));
    }
    for (uint64_t y = 0; y < total_; ++y)
      if (find(y) == y) ++classes_;
  }

  uint64_t class_count() const { return classes_; }

  /// Class of a lift of U0 (any U + Y).
  uint64_t class_of(const MatW& lift) {
    require(data_.reduce(lift) == data_.reduce(U_), ErrorKind::NotCongruent, "not a lift of U0");
    return find(index_from_digits(digits_of(lift - U_)));
  }

 private:
  MatW U_;
  SquareZeroData data_;
  GroupSpec spec_;
  int n_;
  std::vector<RingElem> elems_;
  std::map<std::vector<int64_t>, size_t> elem_index_;
  size_t slots_ = 0;
  uint64_t total_ = 0;
  std::vector<std::vector<size_t>> deltas_;
  std::vector<uint64_t> parent_;
  uint64_t classes_ = 0;

  uint64_t find(uint64_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(uint64_t a, uint64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  std::vector<size_t> digits_of(const MatW& Y) const {
    std::vector<size_t> out;
    for (const auto& x : Y.entries())
      for (const auto& c : x.coeffs()) {
        auto it = elem_index_.find(c.coeffs());
        require(it != elem_index_.end(), ErrorKind::NotCongruent, "entry outside W(a)");
        out.push_back(it->second);
      }
    return out;
  }
  std::vector<size_t> digits_from_index(uint64_t y) const {
    std::vector<size_t> out(slots_);
    for (size_t s = 0; s < slots_; ++s) {
      out[s] = y % elems_.size();
      y /= elems_.size();
    }
    return out;
  }
  uint64_t index_from_digits(const std::vector<size_t>& d) const {
    uint64_t y = 0;
    for (size_t s = slots_; s-- > 0;) y = y * elems_.size() + d[s];
    return y;
  }
  // W(a) adds coordinatewise
  std::vector<size_t> add(const std::vector<size_t>& a, const std::vector<size_t>& b) const {
    std::vector<size_t> out(slots_);
    for (size_t s = 0; s < slots_; ++s) out[s] = elem_index_.at((elems_[a[s]] + elems_[b[s]]).coeffs());
    return out;
  }
  MatW decode(uint64_t y) const {
    auto d = digits_from_index(y);
    std::vector<WittVec> entries;
    size_t s = 0;
    for (int e = 0; e < spec_.h * spec_.h; ++e) {
      std::vector<RingElem> c;
      for (int k = 0; k < n_; ++k) c.push_back(elems_[d[s++]]);
      entries.emplace_back(data_.A(), c);
    }
    return MatW(spec_.h, spec_.h, entries);
  }
};

/// The universal deformation over k[t_1..t_r]/(t)^N, r = #u^- positions:
/// U_uni = (1 - sum [t_i] e_i) U0.
struct UniversalDeformation {
  RingPtr T;
  Display D;
  std::vector<std::pair<int, int>> positions;
};

inline UniversalDeformation universal_deformation(const MatW& U0, int N, const GroupSpec& spec) {
  const RingPtr& k = U0(0, 0).ring();
  require(k->kind() == RingKind::Fq, ErrorKind::NotAField, "universal deformation is built over a finite field");
  auto pos = spec.u_minus_positions();
  require(!pos.empty(), ErrorKind::MalformedInput, "mu is central: nothing to deform");
  auto T = Ring::truncated_power_series(k, static_cast<int>(pos.size()), N);
  const int n = U0(0, 0).length();
  auto embed = [&](const RingElem& x) {
    std::vector<int64_t> c(T->width(), 0);
    // the constant monomial is first
    for (size_t i = 0; i < x.coeffs().size(); ++i) c[i] = x.coeffs()[i];
    return RingElem::from_coeffs(T, c);
  };
  MatW U = U0.map([&](const WittVec& x) {
    std::vector<RingElem> c;
    for (const auto& y : x.coeffs()) c.push_back(embed(y));
    return WittVec(T, c);
  });
  MatW g = witt_identity(T, spec.h, n);
  for (size_t i = 0; i < pos.size(); ++i)
    g(pos[i].first, pos[i].second) = -WittVec::teichmuller(RingElem::variable(T, static_cast<int>(i)), n);
  return UniversalDeformation{T, Display{spec, g * U}, pos};
}

/// Ring map k[t]/(t)^N -> A with t_i -> s_i, where s_i s_j = 0.
inline RingElem specialize(const RingElem& x, const std::vector<RingElem>& s, const SquareZeroData& data) {
  const RingPtr& T = x.ring();
  const auto& stdm = T->standard_monomials();
  const size_t f = static_cast<size_t>(T->degree());
  RingElem out = RingElem::zero(data.A());
  for (size_t i = 0; i < stdm.size(); ++i) {
    int deg = 0, var = -1;
    for (size_t v = 0; v < s.size(); ++v)
      if (stdm[i].e[v]) {
        deg += stdm[i].e[v];
        var = static_cast<int>(v);
      }
    if (deg > 1) continue;  // products of the s_i vanish
    // the constant monomial is first in A
    std::vector<int64_t> c(data.A()->width(), 0);
    std::copy(x.coeffs().begin() + static_cast<std::ptrdiff_t>(i * f),
              x.coeffs().begin() + static_cast<std::ptrdiff_t>((i + 1) * f), c.begin());
    RingElem coeff = RingElem::from_coeffs(data.A(), c);
    out += deg == 0 ? coeff : coeff * s[static_cast<size_t>(var)];
  }
  return out;
}

inline MatW specialize(const MatW& M, const std::vector<RingElem>& s, const SquareZeroData& data) {
  return M.map([&](const WittVec& x) {
    std::vector<RingElem> c;
    for (const auto& y : x.coeffs()) c.push_back(specialize(y, s, data));
    return WittVec(data.A(), c);
  });
}

/// Automorphisms h = 1 + X of D over A with X in M_h(W(a)) (so h is the
/// identity modulo a) and h in H^mu: true iff only h = 1 fixes U.
inline bool rigidity_check(const Display& D, const SquareZeroData& data, long double bound = 1e6) {
  require(D.ring()->same_as(*data.A()), ErrorKind::MixedRings, "display must live over A");
  require(is_adjoint_nilpotent(D), ErrorKind::NotAdjointNilpotent, "display is not adjoint nilpotent");
  const int h = D.spec.h, n = D.length();
  auto elems = data.ideal_elements();
  const size_t slots = static_cast<size_t>(h * h * n);
  require(std::pow(static_cast<long double>(elems.size()), slots) <= bound, ErrorKind::Unenumerable,
          "automorphism search exceeds the bound");
  std::vector<size_t> idx(slots, 0);
  int64_t fixed = 0;
  for (;;) {
    bool allowed = true;
    std::vector<WittVec> entries;
    size_t s = 0;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) {
        std::vector<RingElem> c;
        for (int k = 0; k < n; ++k) c.push_back(elems[idx[s++]]);
        if (D.spec.weight(i, j) == -1 && !c[0].is_zero()) allowed = false;
        entries.emplace_back(data.A(), c);
      }
    if (allowed) {
      MatW g = witt_identity(data.A(), h, n) + MatW(h, h, entries);
      if (psi_conjugate(D.U, g, D.spec, data) == D.U) ++fixed;
    }
    size_t k = 0;
    while (k < idx.size() && ++idx[k] == elems.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  require(fixed >= 1, ErrorKind::IntegralityFailure, "identity missing from the automorphism group");
  return fixed == 1;
}

}  // namespace gdisp
