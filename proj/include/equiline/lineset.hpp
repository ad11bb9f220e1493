#pragma once

// The LineSet model, the two algebraic constructions (sign-character lines
// indexed by hyperplanes of an O(2m+1, 2)-space, and Heisenberg orbits of the
// identity map of a Weil eigenspace), and the certificate kernels.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equiline/errors.hpp"
#include "equiline/finfield.hpp"
#include "equiline/heisenberg.hpp"
#include "equiline/weil.hpp"

namespace equiline {

struct ConstructionMeta {
  std::string case_tag;  // "i", "ii", "iii", "iv"
  std::uint32_t p = 0;
  std::uint32_t m = 0;
  std::string choice;    // "plus" / "minus" for cases iii and iv
  std::uint64_t seed = 0;

  friend bool operator==(const ConstructionMeta&, const ConstructionMeta&) = default;
};

class LineSet {
 public:
  static constexpr double norm_tolerance = 1e-10;

  explicit LineSet(Eigen::MatrixXcd vectors, std::optional<ConstructionMeta> meta = {})
      : vectors_(std::move(vectors)), meta_(std::move(meta)) {
    if (vectors_.rows() == 0 || vectors_.cols() == 0) throw error(errc::malformed_lineset, "empty line set");
    for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
      const double dev = std::abs(vectors_.col(i).norm() - 1.0);
      if (dev > norm_tolerance)
        throw error(errc::malformed_lineset, "column " + std::to_string(i) + " is not unit norm (off by " +
                                                 std::to_string(dev) + ")");
    }
  }

  /// Lines with entries sign / sqrt(d); the Gram matrix is then computed over
  /// the integers.
  static LineSet from_signs(Eigen::MatrixXi signs, std::optional<ConstructionMeta> meta = {}) {
    for (Eigen::Index i = 0; i < signs.size(); ++i)
      if (signs.data()[i] != 1 && signs.data()[i] != -1)
        throw error(errc::malformed_lineset, "sign matrix entries must be +1 or -1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(signs.rows()));
    LineSet l(signs.cast<cplx>() * scale, std::move(meta));
    l.signs_ = std::move(signs);
    return l;
  }

  Eigen::Index d() const noexcept { return vectors_.rows(); }
  Eigen::Index n() const noexcept { return vectors_.cols(); }
  const Eigen::MatrixXcd& vectors() const noexcept { return vectors_; }
  const std::optional<ConstructionMeta>& meta() const noexcept { return meta_; }
  const std::optional<Eigen::MatrixXi>& signs() const noexcept { return signs_; }

  void set_meta(std::optional<ConstructionMeta> meta) { meta_ = std::move(meta); }

  /// Re-derives the integer sign matrix when every entry is +-1/sqrt(d).
  bool recover_signs(double tol = 1e-12) {
    const double scale = std::sqrt(static_cast<double>(d()));
    Eigen::MatrixXi s(d(), n());
    for (Eigen::Index c = 0; c < n(); ++c)
      for (Eigen::Index r = 0; r < d(); ++r) {
        const cplx v = vectors_(r, c) * scale;
        if (std::abs(v.imag()) > tol || std::abs(std::abs(v.real()) - 1.0) > tol) return false;
        s(r, c) = v.real() > 0 ? 1 : -1;
      }
    signs_ = std::move(s);
    return true;
  }

 private:
  Eigen::MatrixXcd vectors_;
  std::optional<ConstructionMeta> meta_;
  std::optional<Eigen::MatrixXi> signs_;
};

inline Eigen::Index numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-8) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

inline bool spans(const LineSet& l) { return numerical_rank(l.vectors()) == l.d(); }

// ---------------------------------------------------------------------------
// Constructions

/// Lines indexed by the cosets of the radical in E = F_2^{2m+1}, coordinates
/// indexed by the hyperplanes of the chosen type: column(e)[M] = lambda_M(e).
inline LineSet construct_case_iii(unsigned m, HyperplaneType type) {
  if (m < 2) throw error(errc::parameter_mismatch, "case iii needs m >= 2");
  const QuadForm2 q = standard_form(m);
  const std::vector<Hyperplane> planes = enumerate_hyperplanes(q, type);
  const auto d = static_cast<Eigen::Index>(planes.size());
  const auto n = static_cast<Eigen::Index>(std::uint64_t{1} << (2 * m));
  // The radical is e_0, the top bit, so labels 0..n-1 are the
  // lexicographically least coset representatives.
  Eigen::MatrixXi signs(d, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index r = 0; r < d; ++r)
      signs(r, x) = character_value(planes[static_cast<std::size_t>(r)], F2Vector{q.dim(), static_cast<std::uint64_t>(x)});
  return LineSet::from_signs(std::move(signs), ConstructionMeta{"iii", 2, m, to_string(type), 0});
}

/// Lines (D(a, b, 0) (x) 1) v0 in W (x) U*, where U is a parity eigenspace of
/// W = C^{p^m} and v0 = sum_k u_k (x) u_k^* / sqrt(dim U). Coordinates are
/// ordered (x, k) -> x * dim U + k.
inline LineSet construct_case_iv(std::uint32_t p, std::uint32_t m, Parity choice) {
  const HeisenbergParams params{p, m};
  if (p == 2 || !is_prime(p) || m == 0) throw error(errc::parameter_mismatch, "case iv needs an odd prime p and m >= 1");
  const Eigen::MatrixXcd basis = parity_split(p, m).get(choice);
  const Eigen::Index q = basis.rows(), s = basis.cols();
  const Eigen::Index n = q * q, d = q * s;
  const double norm = 1.0 / std::sqrt(static_cast<double>(s));

  Eigen::MatrixXcd vectors(d, n);
  for (Eigen::Index label = 0; label < n; ++label) {
    const auto e = HeisenbergElement::from_label(params, static_cast<std::uint64_t>(label));
    const Eigen::MatrixXcd moved = schroedinger_rep(e, 1).matrix() * basis;
    for (Eigen::Index x = 0; x < q; ++x)
      for (Eigen::Index k = 0; k < s; ++k) vectors(x * s + k, label) = moved(x, k) * norm;
  }
  LineSet l(std::move(vectors), ConstructionMeta{"iv", p, m, to_string(choice), 0});
  const Eigen::Index rank = numerical_rank(l.vectors());
  if (rank < d)
    throw error(errc::span_deficient, "orbit spans " + std::to_string(rank) + " of " + std::to_string(d) + " dimensions");
  return l;
}

// ---------------------------------------------------------------------------
// Certificates

struct GramMatrix {
  Eigen::MatrixXcd g;
  std::optional<Eigen::MatrixXi> integer;  // g = integer / scale when present
  long scale = 1;

  Eigen::Index n() const noexcept { return g.rows(); }
};

inline GramMatrix gram(const LineSet& l) {
  GramMatrix out;
  if (l.signs()) {
    const Eigen::MatrixXi& s = *l.signs();
    out.integer = s.transpose() * s;
    out.scale = static_cast<long>(s.rows());
    out.g = out.integer->cast<cplx>() / static_cast<double>(out.scale);
  } else {
    out.g = l.vectors().adjoint() * l.vectors();
  }
  return out;
}

struct AngleCertificate {
  double alpha = 0.0;
  double max_dev = 0.0;
  bool exact = false;
  long numerator = 0;    // exact: alpha = numerator / denominator
  long denominator = 1;
};

inline AngleCertificate certify_equiangular(const GramMatrix& gm, double tol = 1e-8) {
  const Eigen::Index n = gm.n();
  if (n < 2) throw error(errc::malformed_lineset, "need at least two lines");
  AngleCertificate cert;
  if (gm.integer) {
    const Eigen::MatrixXi& k = *gm.integer;
    const long common = std::labs(static_cast<long>(k(0, 1)));
    long worst = 0;
    Eigen::Index wi = 0, wj = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const long diff = std::labs(std::labs(static_cast<long>(k(i, j))) - common);
        if (diff > worst) worst = diff, wi = i, wj = j;
      }
    if (worst != 0)
      throw not_equiangular(static_cast<std::size_t>(wi), static_cast<std::size_t>(wj),
                            static_cast<double>(worst) / static_cast<double>(gm.scale));
    const long g = std::gcd(common, gm.scale);
    cert.numerator = common / g;
    cert.denominator = gm.scale / g;
    cert.alpha = static_cast<double>(common) / static_cast<double>(gm.scale);
    cert.exact = true;
    return cert;
  }

  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sum += std::abs(gm.g(i, j));
  cert.alpha = sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  Eigen::Index wi = 0, wj = 1;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dev = std::abs(std::abs(gm.g(i, j)) - cert.alpha);
      if (dev > cert.max_dev) cert.max_dev = dev, wi = i, wj = j;
    }
  if (cert.max_dev > tol) throw not_equiangular(static_cast<std::size_t>(wi), static_cast<std::size_t>(wj), cert.max_dev);
  return cert;
}

/// max |G^2 - (n/d) G|.
inline double frame_residual(const GramMatrix& gm, Eigen::Index d) {
  const double ratio = static_cast<double>(gm.n()) / static_cast<double>(d);
  return (gm.g * gm.g - ratio * gm.g).cwiseAbs().maxCoeff();
}

/// alpha^2 - (n - d) / (d (n - 1)).
inline double welch_residual(double alpha, Eigen::Index n, Eigen::Index d) {
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  return alpha * alpha - (nn - dd) / (dd * (nn - 1.0));
}

/// Exact Welch equality (numerator/denominator)^2 == (n - d) / (d (n - 1)).
inline bool welch_exact(const AngleCertificate& cert, Eigen::Index n, Eigen::Index d) {
  if (!cert.exact) return false;
  const long long lhs = static_cast<long long>(cert.numerator) * cert.numerator * d * (n - 1);
  const long long rhs = static_cast<long long>(n - d) * cert.denominator * cert.denominator;
  return lhs == rhs;
}

inline bool certify_tight(const GramMatrix& gm, Eigen::Index d, double tol = 1e-8) {
  if (frame_residual(gm, d) > tol) return false;
  AngleCertificate cert;
  try {
    cert = certify_equiangular(gm, tol);
  } catch (const not_equiangular&) {
    return true;  // tight but not equiangular; the Welch relation does not apply
  }
  if (cert.exact) return welch_exact(cert, gm.n(), d);
  return std::abs(welch_residual(cert.alpha, gm.n(), d)) <= tol;
}

// ---------------------------------------------------------------------------
// Dimension bookkeeping

struct TheoremCase {
  std::string tag;  // "i".."iv"
  std::uint32_t p = 0;
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t d_small = 0;
  std::uint64_t d_large = 0;
};

/// Every family entry with this many lines.
inline std::vector<TheoremCase> theorem_cases(std::uint64_t n) {
  std::vector<TheoremCase> out;
  if (n == 4) out.push_back({"i", 2, 1, 4, 2, 2});
  if (n == 64) out.push_back({"ii", 2, 3, 64, 8, 56});
  for (std::uint32_t m = 2; 2 * m < 63 && (std::uint64_t{1} << (2 * m)) <= n; ++m)
    if ((std::uint64_t{1} << (2 * m)) == n) {
      const std::uint64_t h = std::uint64_t{1} << (m - 1), t = std::uint64_t{1} << m;
      out.push_back({"iii", 2, m, n, h * (t - 1), h * (t + 1)});
    }
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (!is_prime(p)) continue;
    std::uint64_t q = p;
    for (std::uint32_t m = 1; q * q <= n; ++m, q *= p)
      if (q * q == n) out.push_back({"iv", static_cast<std::uint32_t>(p), m, n, q * (q - 1) / 2, q * (q + 1) / 2});
  }
  return out;
}

/// The companion dimension n - d of a family entry.
inline std::uint64_t dimension_pair(std::uint64_t n, std::uint64_t d) {
  for (const auto& c : theorem_cases(n))
    if (d == c.d_small || d == c.d_large) return n - d;
  throw error(errc::unknown_case, "(n, d) = (" + std::to_string(n) + ", " + std::to_string(d) + ") is not in the family");
}

// ---------------------------------------------------------------------------
// Symmetries supplied by the constructions

/// Unitaries preserving a line set: `translations` realize the regular normal
/// subgroup, `stabilizer` fixes line 0.
struct SymmetryGenerators {
  std::vector<UnitaryMatrix> translations;
  std::vector<UnitaryMatrix> stabilizer;
};

inline SymmetryGenerators case_iii_symmetries(unsigned m, HyperplaneType type) {
  const QuadForm2 q = standard_form(m);
  const F2Vector r = radical(q);
  const std::vector<Hyperplane> planes = enumerate_hyperplanes(q, type);
  const auto d = static_cast<Eigen::Index>(planes.size());
  std::map<std::uint64_t, Eigen::Index> index_of;
  for (Eigen::Index i = 0; i < d; ++i) index_of[planes[static_cast<std::size_t>(i)].functional.bits] = i;

  SymmetryGenerators out;
  for (unsigned i = 1; i < q.dim(); ++i) {
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      diag(k, k) = character_value(planes[static_cast<std::size_t>(k)], F2Vector::unit(q.dim(), i));
    out.translations.emplace_back(std::move(diag));
  }
  // One nonsingular lift per nonzero coset of the radical; the reflections
  // are involutions, so they are their own inverses.
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << (q.dim() - 1)); ++bits) {
    F2Vector a{q.dim(), bits};
    if (q(a) == 0) a = a + r;
    const F2Matrix g = orthogonal_reflection(q, a);
    Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const F2Vector image = pushforward_functional(planes[static_cast<std::size_t>(k)].functional, g);
      perm(index_of.at(image.bits), k) = 1.0;
    }
    out.stabilizer.emplace_back(std::move(perm));
  }
  return out;
}

/// D(e) (x) 1 for unit translations/modulations, and U_g (x) conj(U_g|_U) for
/// the Weil generators, which fix v0 exactly.
inline SymmetryGenerators case_iv_symmetries(std::uint32_t p, std::uint32_t m, Parity choice) {
  const HeisenbergParams params{p, m};
  const Eigen::MatrixXcd basis = parity_split(p, m).get(choice);
  const Eigen::Index s = basis.cols();
  const Eigen::MatrixXcd id_s = Eigen::MatrixXcd::Identity(s, s);

  auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };

  SymmetryGenerators out;
  for (std::uint32_t k = 0; k < 2 * m; ++k) {
    FpVector a(p, m), b(p, m);
    (k < m ? a : b).set(k % m, 1);
    out.translations.emplace_back(kron(schroedinger_rep(HeisenbergElement(params, a, b, 0), 1).matrix(), id_s));
  }
  for (const auto& g : weil_generators(p, m)) {
    const Eigen::MatrixXcd restricted = basis.adjoint() * g.matrix() * basis;
    out.stabilizer.emplace_back(kron(g.matrix(), restricted.conjugate()));
  }
  return out;
}

}  // namespace equiline
