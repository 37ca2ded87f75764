#pragma once

// Rapoport-Zink points at finite truncation: pairs (U, g) with
// g^{-1} b sigma(g) = U mu(p), the J_b action, affine Deligne-Lusztig sets as
// lattice cosets, quasi-isogeny search and the Hodge embedding checks.
//
// Elements of G(W[1/p]) are ShiftedMat p^{-s} G over a Galois ring.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gdisp/chain.hpp"
#include "gdisp/display.hpp"
#include "gdisp/errors.hpp"
#include "gdisp/group.hpp"
#include "gdisp/parallel.hpp"

namespace gdisp {

/// b = u mu(p) with u over F_q.
struct BasePoint {
  GroupSpec spec;
  MatW u;
};

struct RZPoint {
  Display D;
  ShiftedMat g;
};

namespace detail {

inline RingPtr residue_field_of(const RingPtr& G) { return Ring::fq(G->p(), G->degree()); }

/// Witt matrix over F_q, read as exact (zero digits beyond its length),
/// embedded into the Galois ring G whose residue field contains F_q.
inline MatR witt_into_galois(const MatW& M, const RingPtr& G) {
  const RingPtr& F = M(0, 0).ring();
  require(F->kind() == RingKind::Fq && F->p() == G->p() && G->degree() % F->degree() == 0, ErrorKind::MixedRings,
          "coefficient field does not embed into the working ring");
  const int P = G->char_exponent();
  MatW padded = M.map([P](const WittVec& x) { return x.length() >= P ? x.truncated(P) : x.padded(P); });
  auto Gs = Ring::galois(G->p(), P, F->degree());
  MatR small = witt_to_galois(padded, Gs);
  if (F->degree() == G->degree()) return change_precision(small, G);
  return GaloisEmbedding(Gs, G)(small);
}

inline MatR mu_p(const RingPtr& G, const GroupSpec& spec) {
  MatR m = ring_identity(G, spec.h);
  for (int i = 0; i < spec.h; ++i)
    if (spec.weights[static_cast<size_t>(i)]) m(i, i) = p_power(G, 1);
  return m;
}

/// x = p^v w, asserting divisibility.
inline MatR divide_by_p_power(const MatR& M, int v) {
  return M.map([v](const RingElem& x) { return gdisp::divide_by_p_power(x, v); });
}

}  // namespace detail

/// b over the working Galois ring G.
inline MatR base_b(const BasePoint& base, const RingPtr& G) {
  return detail::witt_into_galois(base.u, G) * detail::mu_p(G, base.spec);
}

/// g^{-1} b sigma(g) = U mu(p), compared modulo p^n where n is the Witt length
/// of U. With g = p^{-s} G and det G = p^D u this reads
/// adj(G) b sigma(G) = p^D u U mu(p) mod p^{n+D}.
inline bool rz_condition(const Display& D, const ShiftedMat& g, const BasePoint& base, int guard = 1) {
  const RingPtr& G = g.m(0, 0).ring();
  const RingPtr& F = D.ring();
  require(F->kind() == RingKind::Fq && F->p() == G->p() && F->degree() == G->degree(), ErrorKind::MixedRings,
          "g must live over W of the display's coefficient field");
  const int P = G->char_exponent(), n = D.length();
  RingElem det = determinant(g.m);
  const int Dv = valuation(det);
  require(Dv < P - guard && n + Dv <= P, ErrorKind::InsufficientPrecision, "g carries too few digits");
  auto Gc = Ring::galois(G->p(), n + Dv, G->degree());
  MatR lhs = change_precision(adjugate(g.m) * base_b(base, G) * sigma(g.m), Gc);
  MatR rhs = change_precision(display_b(D).m, Gc).scaled(change_precision(p_power(G, Dv) * unit_part(det), Gc));
  return lhs == rhs;
}

inline bool rz_condition(const RZPoint& pt, const BasePoint& base, int guard = 1) {
  return rz_condition(pt.D, pt.g, base, guard);
}

/// (U, g) . h = (h^{-1} U Phi(h), g h); h is read as exact in g's ring.
inline RZPoint hmu_act(const RZPoint& pt, const MatW& h) {
  Display D = phi_conjugate(pt.D, h, FrobMode::Padded);
  MatR hg = detail::witt_into_galois(h, pt.g.m(0, 0).ring());
  return RZPoint{D, ShiftedMat{pt.g.m * hg, pt.g.shift}};
}

/// j^{-1} b sigma(j) = b, i.e. adj(J) b sigma(J) = det(J) b.
inline bool in_jb(const ShiftedMat& j, const MatR& b) {
  return adjugate(j.m) * b * sigma(j.m) == b.scaled(determinant(j.m));
}

inline RZPoint jb_action(const RZPoint& pt, const ShiftedMat& j, const BasePoint& base) {
  const RingPtr& G = j.m(0, 0).ring();
  require(in_jb(j, base_b(base, G)), ErrorKind::NotInJb, "j does not commute with b sigma");
  return RZPoint{pt.D, ShiftedMat{j.m * pt.g.m, j.shift + pt.g.shift}};
}

struct LatticeCoset {
  MatR G;             // p^N g, lower triangular with p-power diagonal
  std::vector<int> a;  // diagonal exponents of g
  int shift = 0;       // g = p^{-shift} G
};

struct AdlvResult {
  std::vector<LatticeCoset> cosets;
  int64_t candidates = 0;
  int precision = 0;
};

inline int adlv_precision(int h, int N, int guard = 1) { return 2 * h * N + 2 + guard; }

/// Lattices g W'^h with p^N W'^h <= g W'^h <= p^{-N} W'^h and
/// g^{-1} b sigma(g) in K mu(p) K, over W' = W(F_{p^{f m}}).
inline AdlvResult adlv_enumerate(const BasePoint& base, int m, int N, long double bound = 1e6, int guard = 1) {
  const GroupSpec& spec = base.spec;
  require(spec.is_full_gl(), ErrorKind::MalformedInput, "ADLV enumeration is implemented for GL_h");
  require(m >= 1 && N >= 0, ErrorKind::MalformedInput, "bad extension degree or window");
  const RingPtr& F = base.u(0, 0).ring();
  const int h = spec.h, P = adlv_precision(h, N, guard);
  auto W = Ring::galois(F->p(), P, F->degree() * m);
  const long double Q = std::pow(static_cast<long double>(F->p()), F->degree() * m);
  // candidate count: sum over diagonals of prod_{i>j} Q^{a_i+N}
  long double total = 0;
  {
    std::vector<int> a(static_cast<size_t>(h), -N);
    for (;;) {
      long double c = 1;
      for (int i = 0; i < h; ++i) c *= std::pow(Q, i * (a[static_cast<size_t>(i)] + N));
      total += c;
      int k = 0;
      while (k < h && ++a[static_cast<size_t>(k)] > N) a[static_cast<size_t>(k++)] = -N;
      if (k == h) break;
    }
  }
  require(total <= bound, ErrorKind::SearchSpaceTooLarge, "ADLV candidate count exceeds the search bound");
  const MatR b = base_b(base, W);

  std::vector<LatticeCoset> cands;
  std::map<int, std::vector<RingElem>> residues;  // all of W'/p^k, lifted with zero digits
  auto residues_mod = [&](int k) -> const std::vector<RingElem>& {
    auto it = residues.find(k);
    if (it != residues.end()) return it->second;
    std::vector<RingElem> out;
    if (k == 0) {
      out.push_back(RingElem::zero(W));
    } else {
      auto Wk = Ring::galois(F->p(), k, F->degree() * m);
      for (const auto& x : ring_enumerate(Wk)) out.push_back(change_precision(x, W));
    }
    return residues.emplace(k, std::move(out)).first->second;
  };
  std::vector<int> a(static_cast<size_t>(h), -N);
  for (;;) {
    std::vector<std::pair<int, int>> lower;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < i; ++j) lower.emplace_back(i, j);
    std::vector<size_t> idx(lower.size(), 0);
    for (;;) {
      MatR G(h, h, RingElem::zero(W));
      for (int i = 0; i < h; ++i) G(i, i) = p_power(W, a[static_cast<size_t>(i)] + N);
      for (size_t k = 0; k < lower.size(); ++k) {
        auto [i, j] = lower[k];
        G(i, j) = residues_mod(a[static_cast<size_t>(i)] + N)[idx[k]];
      }
      cands.push_back(LatticeCoset{G, a, N});
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == residues_mod(a[static_cast<size_t>(lower[k].first)] + N).size())
        idx[k++] = 0;
      if (k == idx.size()) break;
    }
    int k = 0;
    while (k < h && ++a[static_cast<size_t>(k)] > N) a[static_cast<size_t>(k++)] = -N;
    if (k == h) break;
  }

  auto keep = parallel_map(cands.size(), [&](size_t c) -> char {
    const MatR& G = cands[c].G;
    int D = 0;
    for (int x : cands[c].a) D += x + N;
    MatR adj = adjugate(G);
    // p^N g^{-1} integral
    if (valuation(adj) < D - 2 * N) return 0;
    return cartan_membership(ShiftedMat{adj * b * sigma(G), D}, spec, guard) ? 1 : 0;
  });
  AdlvResult res;
  res.candidates = static_cast<int64_t>(cands.size());
  res.precision = P;
  for (size_t c = 0; c < cands.size(); ++c)
    if (keep[c]) res.cosets.push_back(cands[c]);
  std::sort(res.cosets.begin(), res.cosets.end(), [](const LatticeCoset& x, const LatticeCoset& y) {
    if (x.a != y.a) return x.a < y.a;
    return detail::encode(x.G) < detail::encode(y.G);
  });
  return res;
}

/// Independent count for GL_h: enumerate matrices G over W'/p^{2N+1} (read as
/// exact), group them by the lattice they span, and for each lattice search
/// the K/H^mu representatives k for which U = (Gk)^{-1} b sigma(Gk) mu(p)^{-1}
/// is integral and invertible; the RZ condition is then re-checked on (U, Gk).
/// Returns the number of lattices admitting a point; throws if some lattice
/// admits more than one representative.
inline int64_t adlv_bruteforce_count(const BasePoint& base, int m, int N, long double bound = 1e6, int guard = 1) {
  const GroupSpec& spec = base.spec;
  require(spec.is_full_gl(), ErrorKind::MalformedInput, "brute force is implemented for GL_h");
  const RingPtr& F = base.u(0, 0).ring();
  const int h = spec.h, P = adlv_precision(h, N, guard), fm = F->degree() * m;
  auto W = Ring::galois(F->p(), P, fm);
  auto Wmod = Ring::galois(F->p(), 2 * N + 1, fm);
  auto elems = ring_enumerate(Wmod);
  require(std::pow(static_cast<long double>(elems.size()), h * h) <= bound, ErrorKind::SearchSpaceTooLarge,
          "brute-force ADLV search exceeds the bound");
  const MatR b = base_b(base, W);
  MatR p_mu_inv = ring_identity(W, h);  // p mu(p)^{-1}
  for (int i = 0; i < h; ++i)
    if (!spec.weights[static_cast<size_t>(i)]) p_mu_inv(i, i) = p_power(W, 1);

  // K/H^mu representatives: lifts of GL_h(k)/P_mu(k) with k = F_{p^fm}
  auto kf = Ring::fq(F->p(), fm);
  std::vector<MatR> flags;
  {
    std::vector<std::vector<RingElem>> choices(static_cast<size_t>(h * h), ring_enumerate(kf));
    std::set<std::vector<uint64_t>> seen_cosets;
    auto Pmu = std::vector<MatR>{};
    detail::for_each_matrix(h, choices, [&](const MatR& x) {
      if (determinant(x).is_unit() && parabolic_membership(x, spec)) Pmu.push_back(x);
    });
    detail::for_each_matrix(h, choices, [&](const MatR& x) {
      if (!determinant(x).is_unit()) return;
      std::vector<uint64_t> key;
      for (const auto& y : Pmu) {
        auto e = detail::encode(x * y);
        if (key.empty() || e < key) key = e;
      }
      if (seen_cosets.insert(key).second) flags.push_back(x);
    });
  }
  auto lift = [&](const MatR& x) {
    auto Wt = Ring::galois(F->p(), P, fm);
    return x.map([&](const RingElem& r) { return galois_teichmuller(r, Wt); });
  };

  // span of the columns of G in (W/p^{2N+1})^h; it determines a lattice
  // containing p^{2N} W^h
  const int modk = 2 * N + 1;
  auto span_key = [&](const MatR& G) {
    std::set<std::vector<uint64_t>> span;
    auto Wk = Ring::galois(F->p(), modk, fm);
    auto coeffs = ring_enumerate(Wk);
    MatR Gk = change_precision(G, Wk);
    std::vector<size_t> idx(static_cast<size_t>(h), 0);
    for (;;) {
      std::vector<uint64_t> v;
      for (int i = 0; i < h; ++i) {
        RingElem acc = RingElem::zero(Wk);
        for (int j = 0; j < h; ++j) acc += Gk(i, j) * coeffs[idx[static_cast<size_t>(j)]];
        v.push_back(ring_index_of(acc));
      }
      span.insert(v);
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == coeffs.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    return span;
  };

  std::map<std::set<std::vector<uint64_t>>, MatR> lattices;
  std::vector<std::vector<RingElem>> choices(static_cast<size_t>(h * h), elems);
  detail::for_each_matrix(h, choices, [&](const MatR& Gs) {
    MatR G = change_precision(Gs, W);
    RingElem det = determinant(G);
    int D = valuation(det);
    if (D > 2 * h * N) return;
    if (valuation(adjugate(G)) < D - 2 * N) return;  // lattice contains p^{2N} W^h
    lattices.emplace(span_key(G), G);
  });

  int64_t count = 0;
  for (const auto& [key, G0] : lattices) {
    int hits = 0;
    for (const auto& k : flags) {
      MatR G = G0 * lift(k);
      RingElem det = determinant(G);
      int D = valuation(det);
      // p det(G) U = adj(G) b sigma(G) p mu(p)^{-1}
      MatR X = adjugate(G) * b * sigma(G) * p_mu_inv;
      if (valuation(X) < D + 1) continue;
      MatR Ug = detail::divide_by_p_power(X, D + 1).scaled(unit_part(det).inv());
      if (!determinant(Ug).is_unit()) continue;
      const int n = P - D - 1 - guard;
      if (n < 1) continue;
      auto Gn = Ring::galois(F->p(), n, fm);
      Display Dsp{spec, galois_to_witt(change_precision(Ug, Gn), kf)};
      require(rz_condition(Dsp, ShiftedMat{G, N}, BasePoint{spec, base.u}, guard), ErrorKind::IntegralityFailure,
              "recovered U fails the RZ condition");
      ++hits;
    }
    require(hits <= 1, ErrorKind::IntegralityFailure, "lattice admits several K/H^mu representatives");
    count += hits;
  }
  return count;
}

/// g with b1 sigma(g) = g b2 modulo p^n and v(det g) < n, searched over
/// integral g in M_h(W_n(F_q)).
inline std::optional<ShiftedMat> quasi_isogeny_search(const Display& D1, const Display& D2, long double bound = 1e6) {
  require(D1.length() == D2.length() && D1.ring()->same_as(*D2.ring()), ErrorKind::MixedRings,
          "displays live over different rings or lengths");
  const RingPtr& F = D1.ring();
  require(F->kind() == RingKind::Fq, ErrorKind::NotAField, "quasi-isogeny search needs a finite field");
  const int h = D1.spec.h, n = D1.length();
  MatR b1 = display_b(D1).m, b2 = display_b(D2).m;
  auto G = b1(0, 0).ring();
  auto elems = ring_enumerate(G);
  require(std::pow(static_cast<long double>(elems.size()), h * h) <= bound, ErrorKind::SearchSpaceTooLarge,
          "quasi-isogeny search exceeds the bound");
  if (b1 == b2) return ShiftedMat{ring_identity(G, h), 0};
  std::optional<ShiftedMat> found;
  std::vector<std::vector<RingElem>> choices(static_cast<size_t>(h * h), elems);
  detail::for_each_matrix(h, choices, [&](const MatR& g) {
    if (found) return;
    if (valuation(determinant(g)) >= n) return;
    if (b1 * sigma(g) == g * b2) found = ShiftedMat{g, 0};
  });
  return found;
}

/// Stabiliser of (U, g) in H^mu(W_n(R)) under (U, g) . h = (h^{-1} U Phi(h), g h)
/// is trivial.
inline bool automorphism_triviality(const RZPoint& pt, long double bound = 1e6) {
  const RingPtr& R = pt.D.ring();
  require(R->kind() == RingKind::Fq, ErrorKind::MalformedInput, "automorphism test needs a finite reduced ring");
  const int n = pt.D.length();
  const RingPtr& G = pt.g.m(0, 0).ring();
  const int D = valuation(determinant(pt.g.m));
  require(n + D <= G->char_exponent(), ErrorKind::InsufficientPrecision, "g carries too few digits");
  auto Gc = Ring::galois(G->p(), n + D, G->degree());
  MatR g = change_precision(pt.g.m, Gc);
  MatW key = display_key(pt.D.U, pt.D.spec);
  int64_t stab = 0;
  for (const auto& h : enumerate_hmu(R, pt.D.spec, n, bound)) {
    if (phi_conjugate(pt.D, h, FrobMode::Padded).U != key) continue;
    if (g * detail::witt_into_galois(h, Gc) == g) ++stab;
  }
  require(stab >= 1, ErrorKind::IntegralityFailure, "identity missing from the stabiliser");
  return stab == 1;
}

/// The Hodge embedding forgets the subgroup equations.
inline RZPoint hodge_embed(const RZPoint& pt) {
  return RZPoint{Display{GroupSpec::gl(pt.D.spec.weights), pt.D.U}, pt.g};
}

/// Isomorphism classes of the displays underlying the sample, computed over
/// the subgroup and over GL_h: true iff no two subgroup classes merge.
inline bool embed_injectivity_check(const std::vector<RZPoint>& pts, long double bound = 1e6) {
  if (pts.empty()) return true;
  const GroupSpec& sub = pts[0].D.spec;
  GroupSpec gl = GroupSpec::gl(sub.weights);
  const RingPtr& R = pts[0].D.ring();
  const int n = pts[0].D.length();
  auto Hsub = enumerate_hmu(R, sub, n, bound), Hgl = enumerate_hmu(R, gl, n, bound);
  auto iso = [&](const Display& a, const Display& b, const std::vector<MatW>& H) {
    MatW target = display_key(b.U, b.spec);
    for (const auto& h : H)
      if (phi_conjugate(Display{gl, a.U}, h, FrobMode::Padded).U == target) return true;
    return false;
  };
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (iso(pts[i].D, pts[j].D, Hgl) && !iso(pts[i].D, pts[j].D, Hsub)) return false;
  return true;
}

}  // namespace gdisp
