#pragma once

// Linear algebra over prime fields and the orthogonal geometry of a quadratic
// form on F_2^{2m+1} whose polarization has a one-dimensional radical.
//
// F_2 vectors are packed into a machine word. Coordinate 0 is the most
// significant bit, so the integer order of the packed words is the
// lexicographic order of coordinate tuples.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "equiline/errors.hpp"

namespace equiline {

// ---------------------------------------------------------------------------
// FpVector

class FpVector {
 public:
  FpVector() = default;

  FpVector(std::uint32_t p, std::size_t length) : p_(p), coords_(length, 0) { check_prime(p); }

  FpVector(std::uint32_t p, std::vector<std::uint32_t> coords) : p_(p), coords_(std::move(coords)) {
    check_prime(p);
    for (auto& c : coords_) c %= p_;
  }

  /// Vector with coordinates given by the base-p digits of `index`, most
  /// significant digit first.
  static FpVector from_index(std::uint32_t p, std::size_t length, std::uint64_t index) {
    FpVector v(p, length);
    for (std::size_t i = length; i-- > 0;) {
      v.coords_[i] = static_cast<std::uint32_t>(index % p);
      index /= p;
    }
    return v;
  }

  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (auto c : coords_) idx = idx * p_ + c;
    return idx;
  }

  std::uint32_t modulus() const noexcept { return p_; }
  std::size_t size() const noexcept { return coords_.size(); }
  std::uint32_t operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<std::uint32_t>& coords() const noexcept { return coords_; }

  void set(std::size_t i, std::uint32_t value) { coords_[i] = value % p_; }

  bool is_zero() const {
    for (auto c : coords_)
      if (c != 0) return false;
    return true;
  }

  FpVector operator+(const FpVector& o) const {
    check_compatible(o);
    FpVector r = *this;
    for (std::size_t i = 0; i < coords_.size(); ++i) r.coords_[i] = (coords_[i] + o.coords_[i]) % p_;
    return r;
  }

  FpVector operator-() const {
    FpVector r = *this;
    for (auto& c : r.coords_) c = (p_ - c) % p_;
    return r;
  }

  FpVector operator-(const FpVector& o) const { return *this + (-o); }

  FpVector scaled(std::uint64_t k) const {
    FpVector r = *this;
    k %= p_;
    for (auto& c : r.coords_) c = static_cast<std::uint32_t>((c * k) % p_);
    return r;
  }

  std::uint32_t dot(const FpVector& o) const {
    check_compatible(o);
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < coords_.size(); ++i) s += std::uint64_t{coords_[i]} * o.coords_[i];
    return static_cast<std::uint32_t>(s % p_);
  }

  friend bool operator==(const FpVector&, const FpVector&) = default;

 private:
  static void check_prime(std::uint32_t p) {
    if (p < 2) throw error(errc::parameter_mismatch, "modulus must be a prime, got " + std::to_string(p));
    for (std::uint32_t q = 2; q * q <= p; ++q)
      if (p % q == 0) throw error(errc::parameter_mismatch, std::to_string(p) + " is not prime");
  }

  void check_compatible(const FpVector& o) const {
    if (p_ != o.p_ || coords_.size() != o.coords_.size())
      throw error(errc::parameter_mismatch, "FpVector modulus or length mismatch");
  }

  std::uint32_t p_ = 2;
  std::vector<std::uint32_t> coords_;
};

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// ---------------------------------------------------------------------------
// Packed F_2 vectors

struct F2Vector {
  unsigned dim = 0;
  std::uint64_t bits = 0;

  static constexpr unsigned max_dim = 31;

  static F2Vector unit(unsigned dim, unsigned i) { return {dim, std::uint64_t{1} << (dim - 1 - i)}; }

  unsigned coord(unsigned i) const { return static_cast<unsigned>((bits >> (dim - 1 - i)) & 1U); }
  bool is_zero() const { return bits == 0; }

  F2Vector operator+(const F2Vector& o) const { return {dim, bits ^ o.bits}; }
  unsigned dot(const F2Vector& o) const { return static_cast<unsigned>(std::popcount(bits & o.bits) & 1); }

  FpVector to_fp() const {
    FpVector v(2, dim);
    for (unsigned i = 0; i < dim; ++i) v.set(i, coord(i));
    return v;
  }

  static F2Vector from_fp(const FpVector& v) {
    if (v.modulus() != 2) throw error(errc::parameter_mismatch, "expected a vector over F_2");
    F2Vector r{static_cast<unsigned>(v.size()), 0};
    for (unsigned i = 0; i < r.dim; ++i)
      if (v[i]) r.bits |= std::uint64_t{1} << (r.dim - 1 - i);
    return r;
  }

  friend bool operator==(const F2Vector&, const F2Vector&) = default;
};

/// Linear map on F_2^dim stored by the images of the unit vectors.
struct F2Matrix {
  unsigned dim = 0;
  std::vector<std::uint64_t> images;  // images[i] = M e_i

  static F2Matrix identity(unsigned dim) {
    F2Matrix m{dim, {}};
    for (unsigned i = 0; i < dim; ++i) m.images.push_back(F2Vector::unit(dim, i).bits);
    return m;
  }

  F2Vector apply(const F2Vector& x) const {
    std::uint64_t out = 0;
    for (unsigned i = 0; i < dim; ++i)
      if (x.coord(i)) out ^= images[i];
    return {dim, out};
  }
};

// ---------------------------------------------------------------------------
// Quadratic forms over F_2

/// Q(x) = sum_{i<=j} c_ij x_i x_j. Row i of the coefficient matrix is packed
/// into `rows[i]`; only bits j >= i may be set.
class QuadForm2 {
 public:
  QuadForm2(unsigned dim, std::vector<std::uint64_t> rows) : dim_(dim), rows_(std::move(rows)) {
    if (dim == 0 || dim > F2Vector::max_dim || rows_.size() != dim)
      throw error(errc::parameter_mismatch, "quadratic form needs one coefficient row per coordinate");
    for (unsigned i = 0; i < dim; ++i) {
      const std::uint64_t allowed = (std::uint64_t{1} << (dim - i)) - 1;  // columns j >= i
      if (rows_[i] & ~allowed)
        throw error(errc::parameter_mismatch, "coefficient matrix must be upper triangular");
    }
  }

  unsigned dim() const noexcept { return dim_; }
  const std::vector<std::uint64_t>& rows() const noexcept { return rows_; }

  /// Half the dimension of the nondegenerate quotient, dim = 2m + 1.
  unsigned m() const noexcept { return (dim_ - 1) / 2; }

  unsigned operator()(const F2Vector& x) const {
    unsigned q = 0;
    for (unsigned i = 0; i < dim_; ++i)
      if (x.coord(i)) q ^= static_cast<unsigned>(std::popcount(rows_[i] & x.bits) & 1);
    return q;
  }

  unsigned polar(const F2Vector& x, const F2Vector& y) const { return (*this)(x + y) ^ (*this)(x) ^ (*this)(y); }

  void set_coeff(unsigned i, unsigned j, bool value) {
    const std::uint64_t bit = std::uint64_t{1} << (dim_ - 1 - j);
    rows_[i] = value ? (rows_[i] | bit) : (rows_[i] & ~bit);
  }

 private:
  unsigned dim_;
  std::vector<std::uint64_t> rows_;
};

/// x_0^2 + x_1 x_2 + x_3 x_4 + ... + x_{2m-1} x_{2m}.
inline QuadForm2 standard_form(unsigned m) {
  if (m == 0 || 2 * m + 1 > F2Vector::max_dim) throw error(errc::parameter_mismatch, "standard_form needs m >= 1");
  const unsigned dim = 2 * m + 1;
  QuadForm2 q(dim, std::vector<std::uint64_t>(dim, 0));
  q.set_coeff(0, 0, true);
  for (unsigned i = 1; i < dim; i += 2) q.set_coeff(i, i + 1, true);
  return q;
}

inline F2Vector radical(const QuadForm2& q) {
  const unsigned dim = q.dim();
  std::vector<F2Vector> null;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << dim); ++bits) {
    const F2Vector v{dim, bits};
    bool in_radical = true;
    for (unsigned i = 0; i < dim && in_radical; ++i) in_radical = q.polar(v, F2Vector::unit(dim, i)) == 0;
    if (in_radical) null.push_back(v);
  }
  if (null.size() != 1)
    throw error(errc::radical_dimension,
                "polarization radical has " + std::to_string(null.size() + 1) + " elements, expected 2");
  if (q(null.front()) != 1) throw error(errc::singular_radical, "form vanishes on the radical vector");
  return null.front();
}

enum class HyperplaneType { Plus, Minus, Degenerate };

inline const char* to_string(HyperplaneType t) {
  switch (t) {
    case HyperplaneType::Plus: return "plus";
    case HyperplaneType::Minus: return "minus";
    case HyperplaneType::Degenerate: return "degenerate";
  }
  return "?";
}

/// Kernel of a nonzero functional x -> functional . x.
struct Hyperplane {
  F2Vector functional;
  HyperplaneType type = HyperplaneType::Degenerate;

  bool contains(const F2Vector& e) const { return functional.dot(e) == 0; }
};

/// Singular-vector count inside ker(functional); no radical bookkeeping.
inline std::uint64_t count_singular(const QuadForm2& q, const F2Vector& functional) {
  std::uint64_t s = 0;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << q.dim()); ++bits) {
    const F2Vector v{q.dim(), bits};
    if (functional.dot(v) == 0 && q(v) == 0) ++s;
  }
  return s;
}

namespace detail {

inline HyperplaneType classify_with_radical(const QuadForm2& q, const F2Vector& r, const F2Vector& functional) {
  if (functional.dot(r) == 0) return HyperplaneType::Degenerate;
  const unsigned m = q.m();
  const std::uint64_t big = std::uint64_t{1} << (2 * m - 1);
  const std::uint64_t small = std::uint64_t{1} << (m - 1);
  const std::uint64_t s = count_singular(q, functional);
  if (s == big + small - 1) return HyperplaneType::Plus;
  if (s == big - small - 1) return HyperplaneType::Minus;
  throw error(errc::classifier_mismatch, "singular count " + std::to_string(s) + " matches no hyperplane type");
}

}  // namespace detail

inline HyperplaneType classify_hyperplane(const QuadForm2& q, const F2Vector& functional) {
  if (functional.is_zero() || functional.dim != q.dim())
    throw error(errc::parameter_mismatch, "hyperplane functional must be nonzero with matching dimension");
  return detail::classify_with_radical(q, radical(q), functional);
}

inline std::vector<Hyperplane> enumerate_hyperplanes(const QuadForm2& q, HyperplaneType tag) {
  if (tag == HyperplaneType::Degenerate)
    throw error(errc::parameter_mismatch, "only Plus or Minus hyperplanes can be enumerated");
  const F2Vector r = radical(q);
  std::vector<Hyperplane> out;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << q.dim()); ++bits) {
    const F2Vector phi{q.dim(), bits};
    if (detail::classify_with_radical(q, r, phi) == tag) out.push_back({phi, tag});
  }
  return out;
}

/// The sign character whose kernel is M.
inline int character_value(const Hyperplane& hyperplane, const F2Vector& e) {
  return hyperplane.functional.dot(e) ? -1 : 1;
}

/// x -> x + B(x, a) a. An isometry of q whenever q(a) = 1.
inline F2Matrix orthogonal_reflection(const QuadForm2& q, const F2Vector& a) {
  if (q(a) != 1) throw error(errc::parameter_mismatch, "reflection vector must be nonsingular");
  F2Matrix m{q.dim(), {}};
  for (unsigned i = 0; i < q.dim(); ++i) {
    const F2Vector e = F2Vector::unit(q.dim(), i);
    m.images.push_back((q.polar(e, a) ? e + a : e).bits);
  }
  return m;
}

/// Functional of the image hyperplane g(ker phi), given g^{-1}.
inline F2Vector pushforward_functional(const F2Vector& phi, const F2Matrix& g_inverse) {
  F2Vector out{phi.dim, 0};
  for (unsigned i = 0; i < phi.dim; ++i)
    if (phi.dot(F2Vector{phi.dim, g_inverse.images[i]})) out.bits |= F2Vector::unit(phi.dim, i).bits;
  return out;
}

}  // namespace equiline
