#pragma once

// Unitaries normalizing the Schroedinger image D(E) for odd p, the symplectic
// action they induce on E/Z(E), and the parity eigenspace split of C^{p^m}.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "equiline/errors.hpp"
#include "equiline/finfield.hpp"
#include "equiline/heisenberg.hpp"

namespace equiline {

/// Square matrix over F_p, row-major.
struct FpMatrix {
  std::uint32_t p = 2;
  std::size_t n = 0;
  std::vector<std::uint32_t> data;

  static FpMatrix identity(std::uint32_t p, std::size_t n) {
    FpMatrix m{p, n, std::vector<std::uint32_t>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::uint32_t& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  std::uint32_t operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }

  FpMatrix operator*(const FpMatrix& o) const {
    FpMatrix out{p, n, std::vector<std::uint32_t>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::uint64_t s = 0;
        for (std::size_t k = 0; k < n; ++k) s += std::uint64_t{(*this)(i, k)} * o(k, j);
        out(i, j) = static_cast<std::uint32_t>(s % p);
      }
    return out;
  }

  FpVector apply(const FpVector& v) const {
    FpVector out(p, n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t s = 0;
      for (std::size_t k = 0; k < n; ++k) s += std::uint64_t{(*this)(i, k)} * v[k];
      out.set(i, static_cast<std::uint32_t>(s % p));
    }
    return out;
  }

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;
  friend auto operator<=>(const FpMatrix& a, const FpMatrix& b) { return a.data <=> b.data; }
};

/// Action on (a, b)-coordinates of E/Z(E); column k is the image of the k-th
/// standard generator (a-part first).
struct SymplecticAction {
  HeisenbergParams params;
  FpMatrix matrix;
};

/// b.a' - b'.a mod p for u = (a, b), v = (a', b') in F_p^{2m}; the
/// commutator of D(u) and D(v) is the scalar chi of this value.
inline std::uint32_t symplectic_form(const FpVector& u, const FpVector& v, const HeisenbergParams& params) {
  const std::uint32_t p = params.p, m = params.m;
  std::int64_t s = 0;
  for (std::uint32_t i = 0; i < m; ++i)
    s += std::int64_t{u[m + i]} * v[i] - std::int64_t{v[m + i]} * u[i];
  const auto pp = static_cast<std::int64_t>(p);
  return static_cast<std::uint32_t>(((s % pp) + pp) % pp);
}

inline bool preserves_form(const FpMatrix& s, const HeisenbergParams& params) {
  const std::size_t n = 2 * params.m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      FpVector ei(params.p, n), ej(params.p, n);
      ei.set(i, 1);
      ej.set(j, 1);
      if (symplectic_form(s.apply(ei), s.apply(ej), params) != symplectic_form(ei, ej, params)) return false;
    }
  return true;
}

/// |Sp(2m, p)| = p^{m^2} prod_{i=1..m} (p^{2i} - 1).
inline std::uint64_t symplectic_group_order(std::uint32_t p, std::uint32_t m) {
  std::uint64_t order = ipow(p, m * m);
  for (std::uint32_t i = 1; i <= m; ++i) order *= ipow(p, 2 * i) - 1;
  return order;
}

struct DisplacementMatch {
  std::uint64_t label;  // a * p^m + b
  cplx phase;           // M = phase * D_j(a, b, 0)
};

/// Finds (a, b) with M = phase * D_j(a, b, 0), comparing |tr(D^* M)| / p^m
/// against 1 - tol.
inline std::optional<DisplacementMatch> match_displacement(const Eigen::MatrixXcd& mat, HeisenbergParams params,
                                                           std::uint32_t j, double tol = 1e-8) {
  check_rep_index(params, j);
  const std::uint64_t q = params.carrier_dim();
  if (static_cast<std::uint64_t>(mat.rows()) != q || mat.cols() != mat.rows())
    throw error(errc::parameter_mismatch, "matrix dimension does not match p^m");
  std::vector<FpVector> points;
  for (std::uint64_t i = 0; i < q; ++i) points.push_back(FpVector::from_index(params.p, params.m, i));
  std::vector<cplx> diag(q);
  for (std::uint64_t ia = 0; ia < q; ++ia) {
    for (std::uint64_t ix = 0; ix < q; ++ix)
      diag[ix] = mat(static_cast<Eigen::Index>((points[ix] + points[ia]).index()), static_cast<Eigen::Index>(ix));
    for (std::uint64_t ib = 0; ib < q; ++ib) {
      const FpVector jb = points[ib].scaled(j);
      cplx overlap = 0.0;
      for (std::uint64_t ix = 0; ix < q; ++ix) overlap += std::conj(root_of_unity(params.p, jb.dot(points[ix]))) * diag[ix];
      overlap /= static_cast<double>(q);
      if (std::abs(overlap) >= 1.0 - tol) return DisplacementMatch{ia * q + ib, overlap};
    }
  }
  return std::nullopt;
}

inline SymplecticAction induced_symplectic(const UnitaryMatrix& u, HeisenbergParams params, std::uint32_t j = 1) {
  const std::uint32_t m = params.m;
  const std::uint64_t q = params.carrier_dim();
  SymplecticAction out{params, FpMatrix{params.p, 2 * m, std::vector<std::uint32_t>(4 * m * m, 0)}};
  for (std::uint32_t k = 0; k < 2 * m; ++k) {
    FpVector a(params.p, m), b(params.p, m);
    (k < m ? a : b).set(k % m, 1);
    const UnitaryMatrix d = schroedinger_rep(HeisenbergElement(params, a, b, 0), j);
    const Eigen::MatrixXcd conj = u.matrix() * d.matrix() * u.matrix().adjoint();
    const auto match = match_displacement(conj, params, j);
    if (!match) throw error(errc::not_normalizing, "conjugate of generator " + std::to_string(k) + " is not in D(E)");
    const FpVector img_a = FpVector::from_index(params.p, m, match->label / q);
    const FpVector img_b = FpVector::from_index(params.p, m, match->label % q);
    for (std::uint32_t i = 0; i < m; ++i) {
      out.matrix(i, k) = img_a[i];
      out.matrix(m + i, k) = img_b[i];
    }
  }
  if (!preserves_form(out.matrix, params))
    throw error(errc::not_symplectic, "induced action does not preserve the commutator form");
  return out;
}

inline std::uint32_t primitive_root(std::uint32_t p) {
  for (std::uint32_t g = 2; g < p; ++g) {
    std::uint64_t x = 1;
    std::uint32_t order = 0;
    do {
      x = (x * g) % p;
      ++order;
    } while (x != 1);
    if (order == p - 1) return g;
  }
  return 1;  // p = 2
}

namespace detail {

inline UnitaryMatrix index_substitution(HeisenbergParams params, const FpMatrix& a) {
  const std::uint64_t q = params.carrier_dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::uint64_t ix = 0; ix < q; ++ix) {
    const FpVector x = FpVector::from_index(params.p, params.m, ix);
    m(static_cast<Eigen::Index>(a.apply(x).index()), static_cast<Eigen::Index>(ix)) = 1.0;
  }
  return UnitaryMatrix(std::move(m));
}

inline UnitaryMatrix quadratic_phase(HeisenbergParams params, std::uint32_t i, std::uint32_t j) {
  const std::uint64_t q = params.carrier_dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::uint64_t ix = 0; ix < q; ++ix) {
    const FpVector x = FpVector::from_index(params.p, params.m, ix);
    const auto k = static_cast<Eigen::Index>(ix);
    m(k, k) = root_of_unity(params.p, std::int64_t{x[i]} * x[j]);
  }
  return UnitaryMatrix(std::move(m));
}

}  // namespace detail

inline UnitaryMatrix fourier_matrix(HeisenbergParams params) {
  const std::uint64_t q = params.carrier_dim();
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::uint64_t ix = 0; ix < q; ++ix)
    for (std::uint64_t iy = 0; iy < q; ++iy) {
      const FpVector x = FpVector::from_index(params.p, params.m, ix);
      const FpVector y = FpVector::from_index(params.p, params.m, iy);
      f(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iy)) = norm * root_of_unity(params.p, x.dot(y));
    }
  return UnitaryMatrix(std::move(f));
}

/// Fourier matrix, quadratic phases x -> omega^{x_i x_j} (i <= j), and index
/// substitutions |x> -> |Ax> for generators A of GL(m, p), in that order.
inline std::vector<UnitaryMatrix> weil_generators(std::uint32_t p, std::uint32_t m) {
  if (p == 2 || !is_prime(p) || m == 0) throw error(errc::parameter_mismatch, "Weil generators need an odd prime p and m >= 1");
  const HeisenbergParams params{p, m};
  std::vector<UnitaryMatrix> gens;
  gens.push_back(fourier_matrix(params));
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = i; j < m; ++j) gens.push_back(detail::quadratic_phase(params, i, j));

  FpMatrix scale = FpMatrix::identity(p, m);
  scale(0, 0) = primitive_root(p);
  gens.push_back(detail::index_substitution(params, scale));
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j) {
      if (i == j) continue;
      FpMatrix t = FpMatrix::identity(p, m);
      t(i, j) = 1;
      gens.push_back(detail::index_substitution(params, t));
    }

  for (const auto& g : gens) (void)induced_symplectic(g, params, 1);
  return gens;
}

/// P|x> = |-x>.
inline UnitaryMatrix parity_operator(std::uint32_t p, std::uint32_t m) {
  FpMatrix minus = FpMatrix::identity(p, m);
  for (std::uint32_t i = 0; i < m; ++i) minus(i, i) = p - 1;
  return detail::index_substitution({p, m}, minus);
}

enum class Parity { Plus, Minus };

inline const char* to_string(Parity c) { return c == Parity::Plus ? "plus" : "minus"; }

struct ParitySplit {
  Eigen::MatrixXcd plus;   // even functions, (p^m + 1) / 2 columns
  Eigen::MatrixXcd minus;  // odd functions, (p^m - 1) / 2 columns

  const Eigen::MatrixXcd& get(Parity c) const { return c == Parity::Plus ? plus : minus; }
};

inline ParitySplit parity_split(std::uint32_t p, std::uint32_t m) {
  if (p == 2 || !is_prime(p) || m == 0) throw error(errc::parameter_mismatch, "parity split needs an odd prime p");
  const std::uint64_t q = ipow(p, m);
  const auto qi = static_cast<Eigen::Index>(q);
  const auto half = static_cast<Eigen::Index>((q - 1) / 2);
  ParitySplit s{Eigen::MatrixXcd::Zero(qi, half + 1), Eigen::MatrixXcd::Zero(qi, half)};
  s.plus(0, 0) = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Index col = 0;
  for (std::uint64_t ix = 1; ix < q; ++ix) {
    const std::uint64_t neg = (-FpVector::from_index(p, m, ix)).index();
    if (neg < ix) continue;
    s.plus(static_cast<Eigen::Index>(ix), col + 1) = r;
    s.plus(static_cast<Eigen::Index>(neg), col + 1) = r;
    s.minus(static_cast<Eigen::Index>(ix), col) = r;
    s.minus(static_cast<Eigen::Index>(neg), col) = -r;
    ++col;
  }
  return s;
}

/// Closure of a set of F_p matrices under multiplication, breadth first from
/// the identity. Stops after `max_depth` layers when given.
inline std::set<FpMatrix> matrix_closure(const std::vector<FpMatrix>& gens, std::optional<std::size_t> max_depth = {},
                                         std::size_t max_size = 1'000'000) {
  if (gens.empty()) return {};
  std::set<FpMatrix> seen{FpMatrix::identity(gens.front().p, gens.front().n)};
  std::vector<FpMatrix> frontier(seen.begin(), seen.end());
  for (std::size_t depth = 0; !frontier.empty() && (!max_depth || depth < *max_depth); ++depth) {
    std::vector<FpMatrix> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        FpMatrix y = x * g;
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    if (seen.size() > max_size) throw error(errc::group_too_large, "matrix closure exceeded " + std::to_string(max_size));
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace equiline
