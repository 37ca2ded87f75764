#pragma once

#include <random>

#include "gdisp/matrix.hpp"
#include "gdisp/rings.hpp"
#include "gdisp/witt.hpp"

namespace gdisp::testing {

inline RingElem random_elem(const RingPtr& R, std::mt19937_64& rng) {
  std::uniform_int_distribution<uint64_t> d(0, ring_cardinality(*R) - 1);
  return ring_element_at(R, d(rng));
}

inline WittVec random_witt(const RingPtr& R, int n, std::mt19937_64& rng) {
  std::vector<RingElem> c;
  for (int i = 0; i < n; ++i) c.push_back(random_elem(R, rng));
  return WittVec(R, c);
}

inline MatR random_mat(const RingPtr& R, int h, std::mt19937_64& rng) {
  MatR m(h, h, RingElem::zero(R));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) m(i, j) = random_elem(R, rng);
  return m;
}

inline MatW random_witt_mat(const RingPtr& R, int h, int n, std::mt19937_64& rng) {
  MatW m(h, h, WittVec::zero(R, n));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) m(i, j) = random_witt(R, n, rng);
  return m;
}

inline MatR mat_int(const RingPtr& R, int h, std::vector<long> v) {
  std::vector<RingElem> e;
  for (long x : v) e.push_back(RingElem::from_int(R, x));
  return MatR(h, h, e);
}

}  // namespace gdisp::testing
