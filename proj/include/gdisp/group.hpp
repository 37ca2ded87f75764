#pragma once

// The pair (G, mu): GL_h or a closed subgroup cut out by integer equations,
// with a minuscule cocharacter given as a {0,1} weight vector. Provides the
// parabolic P_mu, the subgroup H^mu of L^+G and the divided Frobenius.

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gdisp/errors.hpp"
#include "gdisp/intpoly.hpp"
#include "gdisp/matrix.hpp"
#include "gdisp/witt.hpp"

namespace gdisp {

using IntMat = std::vector<int64_t>;  // h*h, row major

struct GroupSpec {
  int h = 1;
  std::vector<int> weights;
  /// Equations in the h*h entries (variable i*h+j) and 1/det (variable h*h).
  std::vector<IntPoly> subgroup_eqs;
  std::vector<IntMat> lie_basis;
  std::string name = "GL";

  static GroupSpec gl(std::vector<int> w) {
    GroupSpec s;
    s.h = static_cast<int>(w.size());
    s.weights = std::move(w);
    s.name = "GL";
    for (int i = 0; i < s.h; ++i)
      for (int j = 0; j < s.h; ++j) {
        IntMat e(static_cast<size_t>(s.h * s.h), 0);
        e[static_cast<size_t>(i * s.h + j)] = 1;
        s.lie_basis.push_back(e);
      }
    s.validate();
    return s;
  }

  /// GL_h with d zeros followed by h-d ones.
  static GroupSpec gl_dh(int d, int h) {
    std::vector<int> w(static_cast<size_t>(h), 1);
    for (int i = 0; i < d; ++i) w[static_cast<size_t>(i)] = 0;
    return gl(w);
  }

  /// SL_h: det - 1 = 0, Lie algebra of trace-zero matrices.
  static GroupSpec sl(std::vector<int> w) {
    GroupSpec s;
    s.h = static_cast<int>(w.size());
    s.weights = std::move(w);
    s.name = "SL";
    require(s.h * s.h + 1 <= kMaxVars, ErrorKind::MalformedInput, "subgroup equations support h <= 3");
    s.subgroup_eqs.push_back(det_poly(s.h) - IntPoly::constant(kMaxVars, 1));
    for (int i = 0; i < s.h; ++i)
      for (int j = 0; j < s.h; ++j) {
        if (i == j) continue;
        IntMat e(static_cast<size_t>(s.h * s.h), 0);
        e[static_cast<size_t>(i * s.h + j)] = 1;
        s.lie_basis.push_back(e);
      }
    for (int i = 0; i + 1 < s.h; ++i) {
      IntMat e(static_cast<size_t>(s.h * s.h), 0);
      e[static_cast<size_t>(i * s.h + i)] = 1;
      e[static_cast<size_t>((i + 1) * s.h + i + 1)] = -1;
      s.lie_basis.push_back(e);
    }
    s.validate();
    return s;
  }

  /// Leibniz determinant in the entry variables.
  static IntPoly det_poly(int h) {
    std::vector<int> perm(static_cast<size_t>(h));
    std::iota(perm.begin(), perm.end(), 0);
    IntPoly acc(kMaxVars);
    do {
      int inv = 0;
      for (int a = 0; a < h; ++a)
        for (int b = a + 1; b < h; ++b)
          if (perm[static_cast<size_t>(a)] > perm[static_cast<size_t>(b)]) ++inv;
      IntPoly term = IntPoly::constant(kMaxVars, inv % 2 ? -1 : 1);
      for (int r = 0; r < h; ++r) term = term * IntPoly::variable(kMaxVars, r * h + perm[static_cast<size_t>(r)]);
      acc = acc + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
  }

  int d() const { return static_cast<int>(std::count(weights.begin(), weights.end(), 0)); }
  int weight(int i, int j) const { return weights[static_cast<size_t>(i)] - weights[static_cast<size_t>(j)]; }
  bool is_full_gl() const { return subgroup_eqs.empty(); }
  int lie_dim() const { return static_cast<int>(lie_basis.size()); }
  /// Positions (i, j) with w_i - w_j = -1.
  std::vector<std::pair<int, int>> u_minus_positions() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        if (weight(i, j) == -1) out.emplace_back(i, j);
    return out;
  }

  void validate() const {
    require(h >= 1 && static_cast<int>(weights.size()) == h, ErrorKind::MalformedInput, "weight vector length != h");
    for (int w : weights) require(w == 0 || w == 1, ErrorKind::MalformedInput, "weights must lie in {0,1}");
    require(!lie_basis.empty(), ErrorKind::MalformedInput, "empty Lie basis");
    for (const auto& b : lie_basis)
      require(static_cast<int>(b.size()) == h * h, ErrorKind::MalformedInput, "Lie basis matrix has wrong size");
    require(rank(lie_basis) == lie_dim(), ErrorKind::MalformedInput, "Lie basis is linearly dependent");
    for (const auto& a : lie_basis)
      for (const auto& b : lie_basis) {
        auto span = lie_basis;
        span.push_back(bracket(a, b));
        require(rank(span) == lie_dim(), ErrorKind::MalformedInput, "Lie basis not closed under the bracket");
      }
    for (const auto& e : subgroup_eqs)
      for (const auto& [m, c] : e.terms())
        for (int v = h * h + 1; v < kMaxVars; ++v)
          require(m.e[static_cast<size_t>(v)] == 0, ErrorKind::MalformedInput, "subgroup equation uses unknown variable");
  }

  IntMat bracket(const IntMat& a, const IntMat& b) const {
    IntMat r(static_cast<size_t>(h * h), 0);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        for (int k = 0; k < h; ++k)
          r[static_cast<size_t>(i * h + j)] += a[static_cast<size_t>(i * h + k)] * b[static_cast<size_t>(k * h + j)] -
                                               b[static_cast<size_t>(i * h + k)] * a[static_cast<size_t>(k * h + j)];
    return r;
  }

  static int rank(const std::vector<IntMat>& rows) {
    if (rows.empty()) return 0;
    std::vector<std::vector<mpq_class>> m;
    for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
    int rk = 0;
    const size_t cols = m[0].size();
    for (size_t c = 0; c < cols && rk < static_cast<int>(m.size()); ++c) {
      size_t piv = static_cast<size_t>(rk);
      while (piv < m.size() && m[piv][c] == 0) ++piv;
      if (piv == m.size()) continue;
      std::swap(m[piv], m[static_cast<size_t>(rk)]);
      for (size_t i = 0; i < m.size(); ++i) {
        if (i == static_cast<size_t>(rk) || m[i][c] == 0) continue;
        mpq_class f = m[i][c] / m[static_cast<size_t>(rk)][c];
        for (size_t j = 0; j < cols; ++j) m[i][j] -= f * m[static_cast<size_t>(rk)][j];
      }
      ++rk;
    }
    return rk;
  }

  /// Positions whose entries give integral coordinates in the Lie basis: a
  /// set of dim g entries on which the basis restricts to a unimodular matrix.
  std::vector<int> coordinate_positions() const {
    const int m = lie_dim(), N = h * h;
    std::vector<int> chosen;
    std::function<bool(int)> search = [&](int start) -> bool {
      if (static_cast<int>(chosen.size()) == m) {
        mpq_class det = minor_det(chosen);
        return det == 1 || det == -1;
      }
      for (int pos = start; pos < N; ++pos) {
        chosen.push_back(pos);
        if (search(pos + 1)) return true;
        chosen.pop_back();
      }
      return false;
    };
    require(search(0), ErrorKind::MalformedInput, "Lie basis has no unimodular coordinate minor");
    return chosen;
  }

  mpq_class minor_det(const std::vector<int>& pos) const {
    const size_t m = pos.size();
    std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(m));
    for (size_t r = 0; r < m; ++r)
      for (size_t c = 0; c < m; ++c) a[r][c] = lie_basis[c][static_cast<size_t>(pos[r])];
    mpq_class det = 1;
    for (size_t c = 0; c < m; ++c) {
      size_t piv = c;
      while (piv < m && a[piv][c] == 0) ++piv;
      if (piv == m) return 0;
      if (piv != c) {
        std::swap(a[piv], a[c]);
        det = -det;
      }
      det *= a[c][c];
      for (size_t r = c + 1; r < m; ++r) {
        mpq_class f = a[r][c] / a[c][c];
        for (size_t k = c; k < m; ++k) a[r][k] -= f * a[c][k];
      }
    }
    return det;
  }
};

namespace detail {

/// Evaluate an integer polynomial at Witt-vector arguments.
inline WittVec eval_poly_witt(const IntPoly& P, const std::vector<WittVec>& vals) {
  const WittVec& proto = vals.at(0);
  const RingPtr& R = proto.ring();
  const int n = proto.length();
  std::map<mpz_class, WittVec> consts;
  auto constant = [&](const mpz_class& c) -> WittVec {
    auto it = consts.find(c);
    if (it != consts.end()) return it->second;
    mpz_class a = abs(c);
    WittVec acc = WittVec::zero(R, n), base = WittVec::one(R, n);
    while (a > 0) {
      if (mpz_odd_p(a.get_mpz_t())) acc = acc + base;
      a >>= 1;
      if (a > 0) base = base + base;
    }
    if (c < 0) acc = -acc;
    consts.emplace(c, acc);
    return acc;
  };
  return P.evaluate<WittVec>(
      vals, WittVec::one(R, n), constant, [](const WittVec& a, const WittVec& b) { return a + b; },
      [](const WittVec& a, const WittVec& b) { return a * b; });
}

}  // namespace detail

/// g0 in P_mu(R): invertible, zero at every position of negative weight,
/// and satisfying the subgroup equations.
inline bool parabolic_membership(const MatR& g0, const GroupSpec& spec) {
  require(g0.rows() == spec.h && g0.square(), ErrorKind::MalformedInput, "matrix size does not match the group");
  auto dinv = determinant(g0).try_inv();
  require(dinv.has_value(), ErrorKind::MalformedInput, "parabolic membership needs an invertible matrix");
  for (int i = 0; i < spec.h; ++i)
    for (int j = 0; j < spec.h; ++j)
      if (spec.weight(i, j) < 0 && !g0(i, j).is_zero()) return false;
  if (spec.subgroup_eqs.empty()) return true;
  std::vector<RingElem> vals(g0.entries().begin(), g0.entries().end());
  vals.push_back(*dinv);
  for (const auto& eq : spec.subgroup_eqs)
    if (!detail::eval_poly(eq, vals, g0(0, 0).ring()).is_zero()) return false;
  return true;
}

/// Evaluate the subgroup equations on a Witt matrix (empty equations: true).
inline bool subgroup_membership(const MatW& g, const GroupSpec& spec) {
  require(g.rows() == spec.h && g.square(), ErrorKind::MalformedInput, "matrix size does not match the group");
  if (spec.subgroup_eqs.empty()) return true;
  auto dinv = determinant(g).try_inv();
  require(dinv.has_value(), ErrorKind::NonUnit, "subgroup membership needs an invertible matrix");
  std::vector<WittVec> vals(g.entries().begin(), g.entries().end());
  vals.push_back(*dinv);
  for (const auto& eq : spec.subgroup_eqs)
    if (!detail::eval_poly_witt(eq, vals).is_zero()) return false;
  return true;
}

/// H in H^mu: in G, invertible, with w_0 vanishing on the u^- positions.
inline bool in_hmu(const MatW& H, const GroupSpec& spec) {
  for (auto [i, j] : spec.u_minus_positions())
    if (!H(i, j).in_ideal_I()) return false;
  if (!determinant(w0(H)).is_unit()) return false;
  return subgroup_membership(H, spec);
}

enum class FrobMode {
  Exact,   // length-dropping F and V^{-1}: W_n -> W_{n-1}
  Padded,  // characteristic p: same-length F, V^{-1} padded with a zero top digit
};

namespace detail {

inline WittVec frob_entry(const WittVec& x, FrobMode mode) {
  return mode == FrobMode::Exact ? x.frobenius() : x.frobenius_char_p();
}

inline WittVec p_times(const WittVec& x) { return WittVec::from_int(x.ring(), x.length(), x.p()) * x; }

inline WittVec v_inverse_entry(const WittVec& x, FrobMode mode) {
  if (mode == FrobMode::Padded && x.length() == 1) return WittVec::zero(x.ring(), 1);
  WittVec s = x.shift_down();
  return mode == FrobMode::Exact ? s : s.padded(x.length());
}

}  // namespace detail

/// Entrywise divided Frobenius by weight difference: -1 -> V^{-1}, 0 -> F,
/// +1 -> pF. No membership check on the u^- entries.
inline MatW divided_frobenius_entries(const MatW& H, const GroupSpec& spec, FrobMode mode) {
  return H.map_indexed([&](int i, int j, const WittVec& x) -> WittVec {
    switch (spec.weight(i, j)) {
      case -1: return detail::v_inverse_entry(x, mode);
      case 0: return detail::frob_entry(x, mode);
      default: return detail::p_times(detail::frob_entry(x, mode));
    }
  });
}

inline MatW divided_frobenius(const MatW& H, const GroupSpec& spec, FrobMode mode = FrobMode::Exact) {
  require(H.rows() == spec.h && H.square(), ErrorKind::MalformedInput, "matrix size does not match the group");
  for (auto [i, j] : spec.u_minus_positions())
    require(H(i, j).in_ideal_I(), ErrorKind::NotInHmu,
            "entry (" + std::to_string(i) + "," + std::to_string(j) + ") has nonzero w_0");
  if (mode == FrobMode::Exact) require(H(0, 0).length() >= 2, ErrorKind::LengthUnderflow, "divided Frobenius needs n >= 2");
  return divided_frobenius_entries(H, spec, mode);
}

/// mu^sigma(p) = diag(p^{w_i}) over W_n(R).
inline MatW mu_sigma_p(const RingPtr& R, const GroupSpec& spec, int n) {
  MatW m = witt_identity(R, spec.h, n);
  for (int i = 0; i < spec.h; ++i)
    if (spec.weights[static_cast<size_t>(i)]) m(i, i) = WittVec::from_int(R, n, R->p());
  return m;
}

/// The factorisation H = Hp * Hu with Hp in L^+P_mu and Hu unipotent on u^-.
struct HmuFactor {
  MatW Hp, Hu;
};

inline HmuFactor h_mu_factor(const MatW& H, const GroupSpec& spec) {
  const RingPtr& R = H(0, 0).ring();
  require(R->is_finite(), ErrorKind::NotLocal, "factorisation needs a local ring with p nilpotent");
  require(in_hmu(H, spec), ErrorKind::NotInHmu, "matrix is not in H^mu");
  const int n = H(0, 0).length();
  std::vector<int> A, B;
  for (int i = 0; i < spec.h; ++i) (spec.weights[static_cast<size_t>(i)] ? B : A).push_back(i);
  MatW Hp = H, Hu = witt_identity(R, spec.h, n);
  if (A.empty() || B.empty()) return {Hp, Hu};
  auto sub = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    MatW m(static_cast<int>(rows.size()), static_cast<int>(cols.size()), WittVec::zero(R, n));
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < cols.size(); ++c) m(static_cast<int>(r), static_cast<int>(c)) = H(rows[r], cols[c]);
    return m;
  };
  MatW HAA = sub(A, A), HAB = sub(A, B), HBA = sub(B, A), HBB = sub(B, B);
  MatW X = inverse(HAA) * HAB;
  MatW PBB = HBB - HBA * X;
  for (size_t r = 0; r < A.size(); ++r)
    for (size_t c = 0; c < B.size(); ++c) {
      Hp(A[r], B[c]) = WittVec::zero(R, n);
      Hu(A[r], B[c]) = X(static_cast<int>(r), static_cast<int>(c));
    }
  for (size_t r = 0; r < B.size(); ++r)
    for (size_t c = 0; c < B.size(); ++c) Hp(B[r], B[c]) = PBB(static_cast<int>(r), static_cast<int>(c));
  return {Hp, Hu};
}

/// Projection onto the u^- entries (kernel Lie P_mu).
inline MatR lie_projection_pi(const MatR& X, const GroupSpec& spec) {
  return X.map_indexed([&](int i, int j, const RingElem& x) {
    return spec.weight(i, j) == -1 ? x : RingElem::zero(x.ring());
  });
}

/// Coordinates of a matrix in span(lie_basis), read off a unimodular minor.
inline std::vector<RingElem> lie_coordinates(const MatR& Y, const GroupSpec& spec) {
  const RingPtr& R = Y(0, 0).ring();
  auto pos = spec.coordinate_positions();
  const size_t m = pos.size();
  // Solve B_pos c = y_pos over Z via the integer inverse of the minor.
  std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(2 * m));
  for (size_t r = 0; r < m; ++r) {
    for (size_t c = 0; c < m; ++c) a[r][c] = spec.lie_basis[c][static_cast<size_t>(pos[r])];
    a[r][m + r] = 1;
  }
  for (size_t c = 0; c < m; ++c) {
    size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    mpq_class inv = 1 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (size_t r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      mpq_class f = a[r][c];
      for (size_t k = 0; k < 2 * m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<RingElem> coords;
  for (size_t i = 0; i < m; ++i) {
    RingElem acc = RingElem::zero(R);
    for (size_t r = 0; r < m; ++r) {
      const mpq_class& q = a[i][m + r];
      require(q.get_den() == 1, ErrorKind::IntegralityFailure, "coordinate minor is not unimodular");
      acc += RingElem::from_int(R, q.get_num()) * Y(pos[r] / spec.h, pos[r] % spec.h);
    }
    coords.push_back(acc);
  }
  return coords;
}

/// The matrix sum_k c_k B_k.
inline MatR lie_element(const std::vector<RingElem>& coords, const GroupSpec& spec) {
  const RingPtr& R = coords.at(0).ring();
  MatR out(spec.h, spec.h, RingElem::zero(R));
  for (size_t k = 0; k < coords.size(); ++k)
    for (int e = 0; e < spec.h * spec.h; ++e) {
      int64_t b = spec.lie_basis[k][static_cast<size_t>(e)];
      if (b) out(e / spec.h, e % spec.h) += RingElem::from_int(R, static_cast<long>(b)) * coords[k];
    }
  return out;
}

}  // namespace gdisp
