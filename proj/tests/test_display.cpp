#include <gtest/gtest.h>

#include <set>

#include "gdisp/display.hpp"
#include "test_support.hpp"

using namespace gdisp;
using namespace gdisp::testing;

namespace {

SlopeVec sv(std::vector<std::pair<mpq_class, int>> v) { return v; }

MatW random_unit_mat(const RingPtr& R, int h, int n, std::mt19937_64& rng) {
  for (;;) {
    MatW U = random_witt_mat(R, h, n, rng);
    if (determinant(w0(U)).is_unit()) return U;
  }
}

MatR diag_p(const RingPtr& G, std::vector<int> e) {
  MatR m(static_cast<int>(e.size()), static_cast<int>(e.size()), RingElem::zero(G));
  for (size_t i = 0; i < e.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = p_power(G, e[i]);
  return m;
}

MatR random_gl(const RingPtr& G, int h, std::mt19937_64& rng) {
  for (;;) {
    MatR m = random_mat(G, h, rng);
    if (determinant(m).is_unit()) return m;
  }
}

}  // namespace

TEST(PhiConjugate, IdentityAndAction) {
  std::mt19937_64 rng(31);
  auto F = Ring::fq(2, 1);
  auto spec = GroupSpec::gl({0, 1});
  for (auto mode : {FrobMode::Exact, FrobMode::Padded}) {
    for (int t = 0; t < 10; ++t) {
      Display D = make_display(spec, random_unit_mat(F, 2, 3, rng));
      auto H = enumerate_hmu(F, spec, 3, 1e6);
      const MatW& H1 = H[rng() % H.size()];
      const MatW& H2 = H[rng() % H.size()];
      if (mode == FrobMode::Padded) {
        EXPECT_EQ(phi_conjugate(D, witt_identity(F, 2, 3), mode).U, display_key(D.U, spec));
        Display a = phi_conjugate(phi_conjugate(D, H1, mode), H2, mode);
        EXPECT_EQ(a.U, phi_conjugate(D, H1 * H2, mode).U);
      } else {
        EXPECT_EQ(phi_conjugate(D, witt_identity(F, 2, 3), mode).U, truncated(D.U, 2));
        Display once = phi_conjugate(D, H1, mode);
        Display a = phi_conjugate(once, truncated(H2, 2), mode);
        EXPECT_EQ(a.U, phi_conjugate(D, H1 * H2, mode).U.map([](const WittVec& x) { return x.truncated(1); }));
      }
    }
  }
}

TEST(PhiConjugate, MatchesSigmaConjugationOfB) {
  // b(H^{-1} U Phi(H)) = H^{-1} b sigma(H), all H in H^mu(W_1(F_2)) and W_2(F_2)
  std::mt19937_64 rng(32);
  auto F = Ring::fq(2, 1);
  auto spec = GroupSpec::gl({0, 1});
  for (int n : {1, 2}) {
    Display D = make_display(spec, random_unit_mat(F, 2, n, rng));
    auto G = Ring::galois(2, n, 1);
    for (const auto& H : enumerate_hmu(F, spec, n, 1e6)) {
      ShiftedMat lhs = display_b(phi_conjugate(D, H, FrobMode::Padded));
      ShiftedMat rhs = sigma_conjugate(display_b(D), witt_to_galois(H, G));
      EXPECT_EQ(lhs.m, rhs.m);
    }
  }
}

TEST(PhiConjugate, Errors) {
  auto F = Ring::fq(3, 1);
  auto spec = GroupSpec::gl({0, 1});
  Display D = make_display(spec, witt_identity(F, 2, 2));
  MatW H = witt_identity(F, 2, 2);
  H(0, 1) = WittVec::one(F, 2);
  EXPECT_THROW(phi_conjugate(D, H), Error);
  auto sl = GroupSpec::sl({0, 1});
  Display S = make_display(sl, witt_identity(F, 2, 2));
  MatW two = witt_identity(F, 2, 2);
  two(0, 0) = WittVec::from_int(F, 2, 2);
  try {
    phi_conjugate(S, two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInSubgroup);
  }
}

TEST(AreIsomorphic, Witnesses) {
  std::mt19937_64 rng(33);
  auto F = Ring::fq(2, 1);
  auto spec = GroupSpec::gl({0, 1});
  auto H = enumerate_hmu(F, spec, 2, 1e6);
  for (int t = 0; t < 5; ++t) {
    Display D = make_display(spec, random_unit_mat(F, 2, 2, rng));
    auto w = are_isomorphic(D, D);
    ASSERT_TRUE(w.has_value());
    Display E = phi_conjugate(D, H[rng() % H.size()]);
    auto w2 = are_isomorphic(D, E);
    ASSERT_TRUE(w2.has_value());
    EXPECT_EQ(phi_conjugate(D, *w2).U, E.U);
  }
  EXPECT_THROW(are_isomorphic(make_display(spec, witt_identity(F, 2, 2)), make_display(spec, witt_identity(F, 2, 2)), 10),
               Error);
}

TEST(OrbitCounts, PhiEqualsSigma) {
  auto spec = GroupSpec::gl({0, 1});
  EXPECT_EQ(phi_orbit_count(Ring::fq(2, 1), spec, 1), 2);
  EXPECT_EQ(sigma_orbit_count(Ring::fq(2, 1), spec, 1), 2);
  EXPECT_EQ(phi_orbit_count(Ring::fq(3, 1), spec, 1), sigma_orbit_count(Ring::fq(3, 1), spec, 1));
  EXPECT_EQ(phi_orbit_count(Ring::fq(2, 1), spec, 2), sigma_orbit_count(Ring::fq(2, 1), spec, 2));
}

TEST(SigmaConjugate, OrbitOfDiagOnePSize) {
  // orbit of diag(1,p) under GL_2(Z/4): compare with stabiliser count
  auto G = Ring::galois(2, 2, 1);
  MatR b = diag_p(G, {0, 1});
  auto elems = ring_enumerate(G);
  std::set<std::vector<uint64_t>> orbit;
  int group = 0, stab = 0;
  for (auto& a : elems)
    for (auto& c : elems)
      for (auto& d : elems)
        for (auto& e : elems) {
          MatR g(2, 2, std::vector<RingElem>{a, c, d, e});
          if (!determinant(g).is_unit()) continue;
          ++group;
          MatR r = sigma_conjugate(ShiftedMat{b, 0}, g).m;
          orbit.insert(detail::encode(r));
          if (r == b) ++stab;
        }
  EXPECT_EQ(group, 96);
  EXPECT_EQ(static_cast<int>(orbit.size()) * stab, group);
}

TEST(Slopes, Examples) {
  auto G = Ring::galois(2, 6, 1);
  EXPECT_EQ(newton_slopes(ShiftedMat{ring_identity(G, 3), 0}), sv({{0, 3}}));
  EXPECT_EQ(newton_slopes(ShiftedMat{diag_p(G, {0, 1}), 0}), sv({{0, 1}, {1, 1}}));
  auto G3 = Ring::galois(3, 5, 1);
  EXPECT_EQ(newton_slopes(ShiftedMat{mat_int(G3, 2, {0, 3, 1, 0}), 0}), sv({{mpq_class(1, 2), 2}}));
  EXPECT_EQ(newton_slopes(ShiftedMat{diag_p(G, {1, 2}), 1}), sv({{0, 1}, {1, 1}}));
  EXPECT_THROW(newton_slopes(ShiftedMat{diag_p(G, {0, 5}), 0}), Error);
  // over F_4 the twisted product is needed
  auto G4 = Ring::galois(2, 6, 2);
  RingElem x = RingElem::generator(G4);
  MatR b(2, 2, RingElem::zero(G4));
  b(0, 1) = p_power(G4, 1) * x;
  b(1, 0) = RingElem::one(G4);
  EXPECT_EQ(newton_slopes(ShiftedMat{b, 0}), sv({{mpq_class(1, 2), 2}}));
}

TEST(Slopes, InvariantUnderSigmaConjugationAndSumToDet) {
  std::mt19937_64 rng(34);
  auto G = Ring::galois(2, 8, 2);
  for (int t = 0; t < 20; ++t) {
    MatR U = random_gl(G, 2, rng);
    MatR b = U * diag_p(G, {0, 1});
    auto s = newton_slopes(ShiftedMat{b, 0});
    auto s2 = newton_slopes(sigma_conjugate(ShiftedMat{b, 0}, random_gl(G, 2, rng)));
    EXPECT_EQ(s, s2);
    mpq_class total = 0;
    int mult = 0;
    for (auto& [v, m] : s) {
      total += v * m;
      mult += m;
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
    }
    EXPECT_EQ(mult, 2);
    EXPECT_EQ(total, valuation(determinant(b)));
  }
}

TEST(AdjointSlopes, Examples) {
  auto G = Ring::galois(2, 8, 1);
  auto spec = GroupSpec::gl({0, 1});
  EXPECT_EQ(adjoint_slopes(ShiftedMat{diag_p(G, {0, 1}), 0}, spec), sv({{-1, 1}, {0, 2}, {1, 1}}));
  auto G12 = Ring::galois(2, 12, 1);
  EXPECT_EQ(adjoint_slopes(ShiftedMat{diag_p(G12, {2, 2}), 0}, spec), sv({{0, 4}}));
  EXPECT_THROW(adjoint_slopes(ShiftedMat{diag_p(G, {2, 2}), 0}, spec), Error);
  auto sl = GroupSpec::sl({0, 1});
  EXPECT_EQ(adjoint_slopes(ShiftedMat{diag_p(G, {0, 1}), 0}, sl), sv({{-1, 1}, {0, 1}, {1, 1}}));
}

TEST(AdjointNilpotent, TrivialAndDiagonal) {
  auto F = Ring::fq(2, 1);
  EXPECT_TRUE(is_adjoint_nilpotent(make_display(GroupSpec::gl({0, 0}), witt_identity(F, 2, 2))));
  Display D = make_display(GroupSpec::gl({0, 1}), witt_identity(F, 2, 2));
  EXPECT_FALSE(is_adjoint_nilpotent(D));
  MatW U = witt_identity(F, 2, 2);
  U(0, 0) = WittVec::zero(F, 2);
  U(0, 1) = WittVec::one(F, 2);
  U(1, 0) = WittVec::one(F, 2);
  U(1, 1) = WittVec::zero(F, 2);
  EXPECT_TRUE(is_adjoint_nilpotent(make_display(GroupSpec::gl({0, 1}), U)));
  EXPECT_THROW(is_adjoint_nilpotent(make_display(GroupSpec::gl({0, 1}), witt_identity(Ring::zmod(2, 2), 2, 2))),
               Error);
}

TEST(AdjointNilpotent, AgreesWithSlopesOverF2F4) {
  std::mt19937_64 rng(35);
  auto spec = GroupSpec::gl({0, 1});
  for (int f : {1, 2}) {
    auto F = Ring::fq(2, f);
    const int n = 4 * f + 2;
    for (int t = 0; t < 30; ++t) {
      Display D{spec, random_unit_mat(F, 2, n, rng)};
      bool slopes_ok = true;
      for (auto& [s, m] : adjoint_slopes(D)) slopes_ok = slopes_ok && s > -1;
      EXPECT_EQ(is_adjoint_nilpotent(D), slopes_ok);
    }
  }
}

TEST(Cartan, Membership) {
  std::mt19937_64 rng(36);
  auto G = Ring::galois(2, 3, 1);
  auto spec = GroupSpec::gl({0, 1});
  EXPECT_TRUE(cartan_membership(ShiftedMat{diag_p(G, {0, 1}), 0}, spec));
  EXPECT_FALSE(cartan_membership(ShiftedMat{diag_p(G, {0, 2}), 0}, spec));
  EXPECT_THROW(cartan_membership(ShiftedMat{diag_p(G, {1, 2}), 1}, spec), Error);
  for (int t = 0; t < 20; ++t) {
    MatR b = random_gl(G, 2, rng) * diag_p(G, {0, 1}) * random_gl(G, 2, rng);
    EXPECT_TRUE(cartan_membership(ShiftedMat{b, 0}, spec));
    EXPECT_TRUE(cartan_membership(ShiftedMat{random_gl(G, 2, rng) * b, 0}, spec));
  }
}

TEST(VNilpotent, PositiveSlopes) {
  auto G = Ring::galois(2, 6, 1);
  EXPECT_FALSE(is_v_nilpotent(ShiftedMat{diag_p(G, {0, 1}), 0}));
  EXPECT_TRUE(is_v_nilpotent(ShiftedMat{mat_int(G, 2, {0, 2, 1, 0}), 0}));
}
