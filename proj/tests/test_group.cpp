#include <gtest/gtest.h>

#include "gdisp/chain.hpp"
#include "gdisp/group.hpp"
#include "test_support.hpp"

using namespace gdisp;
using namespace gdisp::testing;

namespace {

MatW random_hmu(const RingPtr& R, const GroupSpec& spec, int n, std::mt19937_64& rng) {
  for (;;) {
    MatW H = random_witt_mat(R, spec.h, n, rng);
    for (auto [i, j] : spec.u_minus_positions()) {
      std::vector<RingElem> c = H(i, j).coeffs();
      c[0] = RingElem::zero(R);
      H(i, j) = WittVec(R, c);
    }
    if (in_hmu(H, spec)) return H;
  }
}

}  // namespace

TEST(GroupSpec, Validation) {
  EXPECT_NO_THROW(GroupSpec::gl({0, 1}));
  EXPECT_NO_THROW(GroupSpec::sl({0, 1, 1}));
  EXPECT_THROW(GroupSpec::gl({0, 2}), Error);
  EXPECT_EQ(GroupSpec::gl_dh(1, 3).d(), 1);
  EXPECT_EQ(GroupSpec::sl({0, 1}).lie_dim(), 3);

  GroupSpec s = GroupSpec::gl({0, 1});
  s.lie_basis = {{0, 1, 0, 0}, {0, 0, 1, 0}};  // [E12, E21] = E11 - E22 is missing
  EXPECT_THROW(s.validate(), Error);
  s.lie_basis = {{0, 1, 0, 0}, {0, 2, 0, 0}};
  EXPECT_THROW(s.validate(), Error);
}

TEST(GroupSpec, UMinusPositions) {
  auto s = GroupSpec::gl({0, 1, 1});
  EXPECT_EQ(s.u_minus_positions(), (std::vector<std::pair<int, int>>{{0, 1}, {0, 2}}));
  auto t = GroupSpec::gl({1, 0});
  EXPECT_EQ(t.u_minus_positions(), (std::vector<std::pair<int, int>>{{1, 0}}));
}

TEST(Parabolic, CountsOverSmallFields) {
  // |P_mu(F_q)| for GL_2 with weights (0,1): lower triangular, (q-1)^2 q
  for (int q : {2, 3}) {
    auto F = Ring::fq(q, 1);
    auto spec = GroupSpec::gl({0, 1});
    int count = 0;
    for (const auto& a : ring_enumerate(F))
      for (const auto& b : ring_enumerate(F))
        for (const auto& c : ring_enumerate(F))
          for (const auto& d : ring_enumerate(F)) {
            MatR g(2, 2, std::vector<RingElem>{a, b, c, d});
            if (!determinant(g).is_unit()) continue;
            if (parabolic_membership(g, spec)) ++count;
          }
    EXPECT_EQ(count, (q - 1) * (q - 1) * q);
  }
}

TEST(Parabolic, SubgroupEquations) {
  auto F = Ring::fq(3, 1);
  auto spec = GroupSpec::sl({0, 1});
  EXPECT_TRUE(parabolic_membership(mat_int(F, 2, {1, 0, 2, 1}), spec));
  EXPECT_FALSE(parabolic_membership(mat_int(F, 2, {2, 0, 0, 1}), spec));
  EXPECT_FALSE(parabolic_membership(mat_int(F, 2, {1, 1, 0, 1}), spec));
  EXPECT_THROW(parabolic_membership(mat_int(F, 2, {1, 1, 1, 1}), spec), Error);
}

TEST(DividedFrobenius, RejectsOutsideHmu) {
  auto F = Ring::fq(2, 1);
  auto spec = GroupSpec::gl({0, 1});
  MatW H = witt_identity(F, 2, 3);
  H(0, 1) = WittVec::one(F, 3);
  try {
    divided_frobenius(H, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInHmu);
  }
}

TEST(DividedFrobenius, AgreesWithGaloisConjugation) {
  // Phi(H)_ij = p^{w_i - w_j} sigma(H_ij), computed in GR(p^n, f)
  std::mt19937_64 rng(21);
  for (auto [p, n, f] : {std::tuple{2, 3, 1}, std::tuple{2, 4, 2}, std::tuple{3, 3, 1}}) {
    auto F = Ring::fq(p, f);
    auto G = Ring::galois(p, n, f), Gs = Ring::galois(p, n - 1, f);
    for (auto w : {std::vector<int>{0, 1}, std::vector<int>{0, 1, 1}, std::vector<int>{1, 0, 1}}) {
      auto spec = GroupSpec::gl(w);
      for (int t = 0; t < 5; ++t) {
        MatW H = random_hmu(F, spec, n, rng);
        MatR Phi = witt_to_galois(divided_frobenius(H, spec), Gs);
        MatR HG = witt_to_galois(H, G);
        for (int i = 0; i < spec.h; ++i)
          for (int j = 0; j < spec.h; ++j) {
            RingElem s = HG(i, j).sigma();
            int d = spec.weight(i, j);
            if (d == 1) s = s * p_power(G, 1);
            if (d == -1) s = divide_by_p_power(s, 1);
            EXPECT_EQ(Phi(i, j), change_precision(s, Gs));
          }
      }
    }
  }
}

TEST(DividedFrobenius, Multiplicative) {
  std::mt19937_64 rng(22);
  auto spec = GroupSpec::gl({0, 1, 1});
  auto F = Ring::fq(2, 2);
  for (int t = 0; t < 5; ++t) {
    MatW A = random_hmu(F, spec, 3, rng), B = random_hmu(F, spec, 3, rng);
    EXPECT_EQ(divided_frobenius(A * B, spec), divided_frobenius(A, spec) * divided_frobenius(B, spec));
  }
  // padded mode over a non-reduced ring agrees below the top digit
  auto D = Ring::dual_numbers(Ring::fq(2, 1));
  for (int t = 0; t < 5; ++t) {
    MatW A = random_hmu(D, spec, 3, rng), B = random_hmu(D, spec, 3, rng);
    MatW lhs = divided_frobenius(A * B, spec, FrobMode::Padded);
    MatW rhs = divided_frobenius(A, spec, FrobMode::Padded) * divided_frobenius(B, spec, FrobMode::Padded);
    EXPECT_EQ(truncated(lhs, 2), truncated(rhs, 2));
    EXPECT_EQ(truncated(lhs, 2), divided_frobenius(A * B, spec, FrobMode::Exact));
  }
}

TEST(HmuFactor, ProductAndFrobenius) {
  std::mt19937_64 rng(23);
  for (auto R : {Ring::fq(3, 1), Ring::zmod(2, 2), Ring::dual_numbers(Ring::fq(2, 1))}) {
    for (auto w : {std::vector<int>{0, 1}, std::vector<int>{1, 0, 1}}) {
      auto spec = GroupSpec::gl(w);
      for (int t = 0; t < 4; ++t) {
        MatW H = random_hmu(R, spec, 3, rng);
        auto [Hp, Hu] = h_mu_factor(H, spec);
        EXPECT_EQ(Hp * Hu, H);
        for (auto [i, j] : spec.u_minus_positions()) EXPECT_TRUE(Hp(i, j).is_zero());
        EXPECT_TRUE(parabolic_membership(w0(Hp), spec));
        EXPECT_EQ(divided_frobenius(H, spec), divided_frobenius(Hp, spec) * divided_frobenius(Hu, spec));
      }
    }
  }
  auto Z = Ring::integer_poly({"a"}, 2);
  EXPECT_THROW(h_mu_factor(witt_identity(Z, 2, 2), GroupSpec::gl({0, 1})), Error);
}

TEST(LieCoordinates, RoundTrip) {
  std::mt19937_64 rng(24);
  auto R = Ring::zmod(3, 2);
  for (auto spec : {GroupSpec::gl({0, 1}), GroupSpec::sl({0, 1, 1})}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<RingElem> c;
      for (int k = 0; k < spec.lie_dim(); ++k) c.push_back(random_elem(R, rng));
      EXPECT_EQ(lie_coordinates(lie_element(c, spec), spec), c);
    }
  }
}

TEST(LieProjection, KeepsOnlyUMinus) {
  auto R = Ring::fq(5, 1);
  MatR X = mat_int(R, 2, {1, 2, 3, 4});
  EXPECT_EQ(lie_projection_pi(X, GroupSpec::gl({0, 1})), mat_int(R, 2, {0, 2, 0, 0}));
}
