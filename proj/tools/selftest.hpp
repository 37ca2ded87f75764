#pragma once

// Quick invariant suite behind `gdisp selftest`.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gdisp/deform.hpp"
#include "gdisp/display.hpp"
#include "gdisp/rz.hpp"
#include "gdisp/witt.hpp"

namespace gdisp::selftest {

struct Property {
  std::string name;
  std::function<bool(std::mt19937_64&)> check;
};

inline RingElem random_elem(const RingPtr& R, std::mt19937_64& rng) {
  std::uniform_int_distribution<uint64_t> d(0, ring_cardinality(*R) - 1);
  return ring_element_at(R, d(rng));
}

inline WittVec random_witt(const RingPtr& R, int n, std::mt19937_64& rng) {
  std::vector<RingElem> c;
  for (int i = 0; i < n; ++i) c.push_back(random_elem(R, rng));
  return WittVec(R, c);
}

inline MatW random_witt_mat(const RingPtr& R, int h, int n, std::mt19937_64& rng) {
  MatW m(h, h, WittVec::zero(R, n));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) m(i, j) = random_witt(R, n, rng);
  return m;
}

inline std::vector<Property> properties() {
  std::vector<Property> out;
  out.push_back({"witt_ghost_identities", [](std::mt19937_64&) {
                   for (int p : {2, 3})
                     if (!verify_ghost_identities(*derive_universal_polys(p, 3))) return false;
                   return true;
                 }});
  out.push_back({"witt_ring_and_fv_identities", [](std::mt19937_64& rng) {
                   const int n = 3;
                   for (const auto& R : {Ring::fq(2, 2), Ring::zmod(3, 2), Ring::dual_numbers(Ring::fq(2, 1))}) {
                     for (int t = 0; t < 20; ++t) {
                       WittVec x = random_witt(R, n, rng), y = random_witt(R, n, rng), z = random_witt(R, n, rng);
                       if ((x + y) * z != x * z + y * z) return false;
                       if (x * y != y * x) return false;
                       WittVec p = WittVec::from_int(R, n, R->p());
                       if (x.verschiebung().frobenius() != p * x) return false;
                       WittVec lhs = (x.frobenius() * y.truncated(n - 1)).verschiebung();
                       if (lhs != x * y.truncated(n - 1).verschiebung()) return false;
                       for (int k = 0; k + 1 < n; ++k)
                         if (x.frobenius().ghost(k) != x.ghost(k + 1)) return false;
                     }
                   }
                   return true;
                 }});
  out.push_back({"phi_orbits_equal_sigma_orbits", [](std::mt19937_64&) {
                   auto F = Ring::fq(2, 1);
                   auto spec = GroupSpec::gl({0, 1});
                   return phi_orbit_count(F, spec, 1) == sigma_orbit_count(F, spec, 1);
                 }});
  out.push_back({"slopes_of_diag_1_p", [](std::mt19937_64&) {
                   auto G = Ring::galois(2, 8, 1);
                   MatR b = ring_identity(G, 2);
                   b(1, 1) = p_power(G, 1);
                   SlopeVec s = newton_slopes(ShiftedMat{b, 0});
                   return s == SlopeVec{{mpq_class(0), 1}, {mpq_class(1), 1}};
                 }});
  out.push_back({"gmzcf_recovers_planted_h", [](std::mt19937_64& rng) {
                   auto k = Ring::fq(2, 1);
                   auto data = SquareZeroData::dual_numbers(k);
                   auto spec = GroupSpec::gl({0, 1});
                   auto elems = data.ideal_elements();
                   for (int t = 0; t < 5; ++t) {
                     MatW U0;
                     do {
                       U0 = random_witt_mat(k, 2, 2, rng);
                     } while (!determinant(w0(U0)).is_unit() || !is_adjoint_nilpotent(Display{spec, U0}));
                     MatW X(2, 2, WittVec::zero(data.A(), 2));
                     for (int e = 0; e < 4; ++e)
                       X(e / 2, e % 2) = WittVec(data.A(), {elems[rng() % 2], elems[rng() % 2]});
                     MatW h0 = witt_identity(data.A(), 2, 2) + X;
                     MatW U = data.lift(U0);
                     if (gmzcf_solve(U, psi_conjugate(U, h0, spec, data), data, spec).h != h0) return false;
                   }
                   return true;
                 }});
  out.push_back({"lift_classes_match_oracle", [](std::mt19937_64&) {
                   auto k = Ring::fq(2, 1);
                   auto data = SquareZeroData::dual_numbers(k);
                   auto spec = GroupSpec::gl({0, 1});
                   MatW U0(2, 2, WittVec::zero(k, 2));
                   U0(0, 1) = WittVec::one(k, 2);
                   U0(1, 0) = WittVec::one(k, 2);
                   LiftOracle oracle(data.lift(U0), data, spec);
                   return oracle.class_count() == 2 && enumerate_lifts(U0, data, spec).size() == 2;
                 }});
  out.push_back({"adlv_gl1_two_n_plus_one", [](std::mt19937_64&) {
                   auto F = Ring::fq(2, 1);
                   BasePoint base{GroupSpec::gl({1}), witt_identity(F, 1, 1)};
                   for (int N = 0; N <= 3; ++N)
                     if (adlv_enumerate(base, 1, N).cosets.size() != static_cast<size_t>(2 * N + 1)) return false;
                   return true;
                 }});
  return out;
}

}  // namespace gdisp::selftest
