#pragma once

// Dense square/rectangular matrices over RingElem or WittVec entries.
// Witt entries may carry different lengths (a display at finite truncation
// knows some columns to one digit less); sums and products then live at the
// smaller length, which is what truncation W_n -> W_m allows.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gdisp/errors.hpp"
#include "gdisp/rings.hpp"
#include "gdisp/witt.hpp"

namespace gdisp {

namespace detail {

inline RingElem zero_like(const RingElem& x) { return RingElem::zero(x.ring()); }
inline RingElem one_like(const RingElem& x) { return RingElem::one(x.ring()); }
inline WittVec zero_like(const WittVec& x) { return WittVec::zero(x.ring(), x.length()); }
inline WittVec one_like(const WittVec& x) { return WittVec::one(x.ring(), x.length()); }

inline RingElem add_elem(const RingElem& a, const RingElem& b) { return a + b; }
inline RingElem sub_elem(const RingElem& a, const RingElem& b) { return a - b; }
inline RingElem mul_elem(const RingElem& a, const RingElem& b) { return a * b; }

inline std::pair<WittVec, WittVec> same_length(const WittVec& a, const WittVec& b) {
  int m = std::min(a.length(), b.length());
  return {a.length() == m ? a : a.truncated(m), b.length() == m ? b : b.truncated(m)};
}
inline WittVec add_elem(const WittVec& a, const WittVec& b) {
  if (a.length() == b.length()) return a + b;
  auto [x, y] = same_length(a, b);
  return x + y;
}
inline WittVec sub_elem(const WittVec& a, const WittVec& b) {
  if (a.length() == b.length()) return a - b;
  auto [x, y] = same_length(a, b);
  return x - y;
}
inline WittVec mul_elem(const WittVec& a, const WittVec& b) {
  if (a.length() == b.length()) return a * b;
  auto [x, y] = same_length(a, b);
  return x * y;
}

inline bool is_zero_elem(const RingElem& x) { return x.is_zero(); }
inline int elem_len(const RingElem&) { return 1; }
inline int elem_len(const WittVec& x) { return x.length(); }
inline bool is_zero_elem(const WittVec& x) { return x.is_zero(); }
inline std::string elem_string(const RingElem& x) { return x.to_string(); }
inline std::string elem_string(const WittVec& x) { return x.to_string(); }

}  // namespace detail

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const T& fill) : r_(rows), c_(cols), a_(static_cast<size_t>(rows * cols), fill) {
    require(rows >= 1 && cols >= 1, ErrorKind::MalformedInput, "matrix dimensions must be positive");
  }
  Mat(int rows, int cols, std::vector<T> entries) : r_(rows), c_(cols), a_(std::move(entries)) {
    require(rows >= 1 && cols >= 1 && a_.size() == static_cast<size_t>(rows * cols), ErrorKind::MalformedInput,
            "matrix entry count mismatch");
  }

  static Mat identity(int n, const T& zero, const T& one) {
    Mat m(n, n, zero);
    for (int i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }
  static Mat identity_like(const Mat& proto) {
    return identity(proto.rows(), detail::zero_like(proto(0, 0)), detail::one_like(proto(0, 0)));
  }
  static Mat zero_like(const Mat& proto) { return Mat(proto.rows(), proto.cols(), detail::zero_like(proto(0, 0))); }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool square() const { return r_ == c_; }
  T& operator()(int i, int j) { return a_[static_cast<size_t>(i * c_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i * c_ + j)]; }
  const std::vector<T>& entries() const { return a_; }

  template <class F>
  auto map(F f) const -> Mat<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    std::vector<U> out;
    out.reserve(a_.size());
    for (const auto& x : a_) out.push_back(f(x));
    return Mat<U>(r_, c_, std::move(out));
  }
  template <class F>
  Mat map_indexed(F f) const {
    std::vector<T> out;
    out.reserve(a_.size());
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out.push_back(f(i, j, (*this)(i, j)));
    return Mat(r_, c_, std::move(out));
  }

  friend bool operator==(const Mat& x, const Mat& y) { return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_; }
  friend bool operator!=(const Mat& x, const Mat& y) { return !(x == y); }
  friend bool operator<(const Mat& x, const Mat& y) { return x.a_ < y.a_; }

  friend Mat operator+(const Mat& x, const Mat& y) {
    x.check_dims(y);
    std::vector<T> out;
    for (size_t i = 0; i < x.a_.size(); ++i) out.push_back(detail::add_elem(x.a_[i], y.a_[i]));
    return Mat(x.r_, x.c_, std::move(out));
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    x.check_dims(y);
    std::vector<T> out;
    for (size_t i = 0; i < x.a_.size(); ++i) out.push_back(detail::sub_elem(x.a_[i], y.a_[i]));
    return Mat(x.r_, x.c_, std::move(out));
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    require(x.c_ == y.r_, ErrorKind::MalformedInput, "matrix product dimension mismatch");
    std::vector<T> out;
    out.reserve(static_cast<size_t>(x.r_ * y.c_));
    for (int i = 0; i < x.r_; ++i)
      for (int j = 0; j < y.c_; ++j) {
        T acc = detail::mul_elem(x(i, 0), y(0, j));
        for (int k = 1; k < x.c_; ++k) {
          // a vanishing term only matters through the precision it carries
          if ((detail::is_zero_elem(x(i, k)) || detail::is_zero_elem(y(k, j))) &&
              detail::elem_len(acc) <= std::min(detail::elem_len(x(i, k)), detail::elem_len(y(k, j))))
            continue;
          acc = detail::add_elem(acc, detail::mul_elem(x(i, k), y(k, j)));
        }
        out.push_back(std::move(acc));
      }
    return Mat(x.r_, y.c_, std::move(out));
  }
  Mat scaled(const T& s) const {
    return map([&](const T& x) { return detail::mul_elem(s, x); });
  }

  Mat transpose() const {
    Mat t(c_, r_, a_[0]);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Delete row i and column j.
  Mat minor(int i, int j) const {
    std::vector<T> out;
    for (int r = 0; r < r_; ++r)
      for (int c = 0; c < c_; ++c)
        if (r != i && c != j) out.push_back((*this)(r, c));
    return Mat(r_ - 1, c_ - 1, std::move(out));
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < r_; ++i) {
      s += i ? ", [" : "[";
      for (int j = 0; j < c_; ++j) s += (j ? ", " : "") + detail::elem_string((*this)(i, j));
      s += "]";
    }
    return s + "]";
  }

 private:
  void check_dims(const Mat& o) const {
    require(r_ == o.r_ && c_ == o.c_, ErrorKind::MalformedInput, "matrix dimension mismatch");
  }
  int r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using MatR = Mat<RingElem>;
using MatW = Mat<WittVec>;

/// Characteristic polynomial det(xI - A) = x^n + c_1 x^(n-1) + ... + c_n by
/// Berkowitz's division-free recursion; returns c_0 = 1, c_1, ..., c_n.
template <class T>
std::vector<T> charpoly(const Mat<T>& A) {
  require(A.square(), ErrorKind::MalformedInput, "charpoly needs a square matrix");
  const int n = A.rows();
  const T zero = detail::zero_like(A(0, 0)), one = detail::one_like(A(0, 0));
  std::vector<T> vect{one, detail::sub_elem(zero, A(0, 0))};
  for (int r = 1; r < n; ++r) {
    // t = [1, -a, -R C, -R A_r C, ..., -R A_r^(r-1) C]
    std::vector<T> t{one, detail::sub_elem(zero, A(r, r))};
    std::vector<T> col(static_cast<size_t>(r), zero);
    for (int i = 0; i < r; ++i) col[static_cast<size_t>(i)] = A(i, r);
    for (int k = 0; k < r; ++k) {
      T dot = zero;
      for (int i = 0; i < r; ++i) dot = detail::add_elem(dot, detail::mul_elem(A(r, i), col[static_cast<size_t>(i)]));
      t.push_back(detail::sub_elem(zero, dot));
      std::vector<T> next(static_cast<size_t>(r), zero);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          next[static_cast<size_t>(i)] =
              detail::add_elem(next[static_cast<size_t>(i)], detail::mul_elem(A(i, j), col[static_cast<size_t>(j)]));
      col = std::move(next);
    }
    std::vector<T> nv(static_cast<size_t>(r + 2), zero);
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= std::min(i, r); ++j)
        nv[static_cast<size_t>(i)] = detail::add_elem(
            nv[static_cast<size_t>(i)], detail::mul_elem(t[static_cast<size_t>(i - j)], vect[static_cast<size_t>(j)]));
    vect = std::move(nv);
  }
  return vect;
}

template <class T>
T determinant(const Mat<T>& A) {
  require(A.square(), ErrorKind::MalformedInput, "determinant needs a square matrix");
  const int n = A.rows();
  if (n == 1) return A(0, 0);
  if (n == 2) return detail::sub_elem(detail::mul_elem(A(0, 0), A(1, 1)), detail::mul_elem(A(0, 1), A(1, 0)));
  auto c = charpoly(A);
  T d = c.back();
  return n % 2 ? detail::sub_elem(detail::zero_like(d), d) : d;
}

/// Classical adjugate: adj(A) A = A adj(A) = det(A) I.
template <class T>
Mat<T> adjugate(const Mat<T>& A) {
  require(A.square(), ErrorKind::MalformedInput, "adjugate needs a square matrix");
  const int n = A.rows();
  if (n == 1) return Mat<T>::identity_like(A);
  Mat<T> adj(n, n, A(0, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T m = determinant(A.minor(j, i));
      adj(i, j) = (i + j) % 2 ? detail::sub_elem(detail::zero_like(m), m) : m;
    }
  return adj;
}

inline std::optional<MatR> try_inverse(const MatR& A) {
  auto dinv = determinant(A).try_inv();
  if (!dinv) return std::nullopt;
  return adjugate(A).scaled(*dinv);
}

inline std::optional<MatW> try_inverse(const MatW& A) {
  auto dinv = determinant(A).try_inv();
  if (!dinv) return std::nullopt;
  return adjugate(A).scaled(*dinv);
}

template <class T>
Mat<T> inverse(const Mat<T>& A) {
  auto r = try_inverse(A);
  if (!r) fail(ErrorKind::NonUnit, "matrix is not invertible");
  return *r;
}

/// Reduction w_0 of a Witt matrix to the coefficient ring.
inline MatR w0(const MatW& M) {
  return M.map([](const WittVec& x) { return x[0]; });
}

inline MatW truncated(const MatW& M, int n) {
  return M.map([n](const WittVec& x) { return x.truncated(n); });
}

/// Entrywise Teichmuller lift.
inline MatW teichmuller(const MatR& M, int n) {
  return M.map([n](const RingElem& x) { return WittVec::teichmuller(x, n); });
}

inline MatW witt_identity(const RingPtr& R, int h, int n) {
  return MatW::identity(h, WittVec::zero(R, n), WittVec::one(R, n));
}

inline MatR ring_identity(const RingPtr& R, int h) {
  return MatR::identity(h, RingElem::zero(R), RingElem::one(R));
}

}  // namespace gdisp
