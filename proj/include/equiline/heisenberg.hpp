#pragma once

// Normal-form arithmetic for the groups E: extraspecial of order p^{1+2m} and
// exponent p when p is odd, and for p = 2 the central product of an
// extraspecial 2-group with C_4. Elements are triples (a, b, c) with
//
//   (a, b, c)(a', b', c') = (a + a', b + b', c + c' + kappa * b.a')
//
// where kappa = 1 and c lives mod p for odd p, kappa = 2 and c lives mod 4
// for p = 2.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "equiline/errors.hpp"
#include "equiline/finfield.hpp"

namespace equiline {

using cplx = std::complex<double>;

/// exp(2 pi i t / k), exact at quarter turns.
inline cplx root_of_unity(std::uint64_t k, std::int64_t t) {
  const auto kk = static_cast<std::int64_t>(k);
  t = ((t % kk) + kk) % kk;
  if ((4 * t) % kk == 0) {
    switch ((4 * t) / kk) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(k);
  return {std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// HeisenbergElement

struct HeisenbergParams {
  std::uint32_t p = 3;
  std::uint32_t m = 1;

  std::uint32_t phase_modulus() const { return p == 2 ? 4 : p; }
  std::uint32_t kappa() const { return p == 2 ? 2 : 1; }
  std::uint64_t carrier_dim() const { return ipow(p, m); }
  std::uint64_t group_order() const { return ipow(p, 2 * m) * phase_modulus(); }

  friend bool operator==(const HeisenbergParams&, const HeisenbergParams&) = default;
};

class HeisenbergElement {
 public:
  HeisenbergElement(HeisenbergParams params, FpVector a, FpVector b, std::uint32_t c)
      : params_(params), a_(std::move(a)), b_(std::move(b)), c_(c % params.phase_modulus()) {
    if (!is_prime(params.p) || params.m == 0)
      throw error(errc::parameter_mismatch, "Heisenberg group needs a prime p and m >= 1");
    if (a_.modulus() != params.p || b_.modulus() != params.p || a_.size() != params.m || b_.size() != params.m)
      throw error(errc::parameter_mismatch, "translation/modulation parts must lie in F_p^m");
  }

  static HeisenbergElement identity(HeisenbergParams params) {
    return {params, FpVector(params.p, params.m), FpVector(params.p, params.m), 0};
  }

  /// Generator (0, 0, 1) of the center.
  static HeisenbergElement central(HeisenbergParams params) {
    return {params, FpVector(params.p, params.m), FpVector(params.p, params.m), 1};
  }

  /// (a, b, 0) with a, b decoded from the lexicographic label a * p^m + b.
  static HeisenbergElement from_label(HeisenbergParams params, std::uint64_t label) {
    const std::uint64_t q = params.carrier_dim();
    return {params, FpVector::from_index(params.p, params.m, label / q), FpVector::from_index(params.p, params.m, label % q),
            0};
  }

  std::uint64_t label() const { return a_.index() * params_.carrier_dim() + b_.index(); }

  const HeisenbergParams& params() const noexcept { return params_; }
  const FpVector& a() const noexcept { return a_; }
  const FpVector& b() const noexcept { return b_; }
  std::uint32_t c() const noexcept { return c_; }

  bool is_identity() const { return a_.is_zero() && b_.is_zero() && c_ == 0; }
  bool is_central() const { return a_.is_zero() && b_.is_zero(); }

  HeisenbergElement operator*(const HeisenbergElement& y) const {
    if (!(params_ == y.params_)) throw error(errc::parameter_mismatch, "multiplying elements of different groups");
    const std::uint32_t mod = params_.phase_modulus();
    const std::uint64_t cocycle = std::uint64_t{params_.kappa()} * b_.dot(y.a_);
    return {params_, a_ + y.a_, b_ + y.b_, static_cast<std::uint32_t>((c_ + y.c_ + cocycle) % mod)};
  }

  HeisenbergElement inverse() const {
    const std::uint32_t mod = params_.phase_modulus();
    const std::uint64_t cocycle = std::uint64_t{params_.kappa()} * b_.dot(a_);
    return {params_, -a_, -b_, static_cast<std::uint32_t>((mod - c_ + cocycle) % mod)};
  }

  HeisenbergElement pow(std::uint64_t k) const {
    HeisenbergElement r = identity(params_);
    for (std::uint64_t i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  friend bool operator==(const HeisenbergElement&, const HeisenbergElement&) = default;

 private:
  HeisenbergParams params_;
  FpVector a_, b_;
  std::uint32_t c_;
};

/// All of E in lexicographic order of (a, b, c).
inline std::vector<HeisenbergElement> enumerate_group(HeisenbergParams params) {
  std::vector<HeisenbergElement> out;
  const std::uint64_t q = params.carrier_dim();
  out.reserve(params.group_order());
  for (std::uint64_t ia = 0; ia < q; ++ia)
    for (std::uint64_t ib = 0; ib < q; ++ib)
      for (std::uint32_t c = 0; c < params.phase_modulus(); ++c)
        out.emplace_back(params, FpVector::from_index(params.p, params.m, ia), FpVector::from_index(params.p, params.m, ib),
                         c);
  return out;
}

inline HeisenbergElement random_element(HeisenbergParams params, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> label(0, params.carrier_dim() * params.carrier_dim() - 1);
  std::uniform_int_distribution<std::uint32_t> phase(0, params.phase_modulus() - 1);
  auto e = HeisenbergElement::from_label(params, label(rng));
  return {params, e.a(), e.b(), phase(rng)};
}

// ---------------------------------------------------------------------------
// UnitaryMatrix

class UnitaryMatrix {
 public:
  static constexpr double tolerance = 1e-10;

  explicit UnitaryMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw error(errc::not_unitary, "matrix must be square and nonempty");
    const double dev = (m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
    if (dev > tolerance) throw error(errc::not_unitary, "deviation from unitarity " + std::to_string(dev));
  }

  static UnitaryMatrix identity(Eigen::Index dim) { return UnitaryMatrix(Eigen::MatrixXcd::Identity(dim, dim)); }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }

  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint(), unchecked{}); }

  UnitaryMatrix operator*(const UnitaryMatrix& o) const {
    if (dim() != o.dim()) throw error(errc::parameter_mismatch, "unitary dimension mismatch");
    return UnitaryMatrix(m_ * o.m_, unchecked{});
  }

 private:
  struct unchecked {};
  UnitaryMatrix(Eigen::MatrixXcd m, unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXcd m_;
};

// ---------------------------------------------------------------------------
// Schroedinger model

inline void check_rep_index(HeisenbergParams params, std::uint32_t j) {
  const bool ok = params.p == 2 ? (j == 1 || j == 3) : (j >= 1 && j < params.p);
  if (!ok) throw error(errc::index_out_of_range, "representation index " + std::to_string(j) + " invalid for p = " +
                                                     std::to_string(params.p));
}

/// D_j(a, b, c) = omega^{jc} X(a) Z(jb) on C^{p^m}, with X(a)|x> = |x + a>
/// and Z(b)|x> = chi(b.x)|x>. omega = zeta_p and chi(t) = zeta_p^t for odd p;
/// omega = i and chi(t) = (-1)^t for p = 2.
inline UnitaryMatrix schroedinger_rep(const HeisenbergElement& e, std::uint32_t j) {
  const auto& params = e.params();
  check_rep_index(params, j);
  const std::uint64_t q = params.carrier_dim();
  const cplx scalar = root_of_unity(params.phase_modulus(), std::int64_t{j} * e.c());
  const FpVector jb = e.b().scaled(j);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::uint64_t ix = 0; ix < q; ++ix) {
    const FpVector x = FpVector::from_index(params.p, params.m, ix);
    const std::uint64_t row = (x + e.a()).index();
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(ix)) = scalar * root_of_unity(params.p, jb.dot(x));
  }
  return UnitaryMatrix(std::move(m));
}

// ---------------------------------------------------------------------------
// Commutant

namespace detail {

inline bool is_normal(const Eigen::MatrixXcd& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a * a.adjoint() - a.adjoint() * a).cwiseAbs().maxCoeff() <= 1e-9 * scale * scale;
}

/// Orthonormal basis vectors grouped into clusters; the commutant is searched
/// among matrices that are block diagonal with respect to the clusters.
struct ClusteredBasis {
  Eigen::MatrixXcd basis;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [begin, end)
};

inline ClusteredBasis trivial_clustering(Eigen::Index d) {
  return {Eigen::MatrixXcd::Identity(d, d), {{0, d}}};
}

// Any X commuting with a family of normal matrices also commutes with their
// adjoints, hence with a random Hermitian combination H. X then preserves the
// eigenspaces of H, which shrinks the unknowns from d^2 to sum(mult^2).
inline ClusteredBasis eigen_clustering(std::span<const Eigen::MatrixXcd> mats, Eigen::Index d) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& a : mats) {
    const double re = coef(rng), im = coef(rng);
    h += re * (a + a.adjoint()) + cplx(0.0, im) * (a - a.adjoint());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double merge = 1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  ClusteredBasis out{eig.eigenvectors(), {}};
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= d; ++i) {
    if (i == d || ev(i) - ev(i - 1) > merge) {
      out.clusters.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

}  // namespace detail

/// Dimension of {X : AX = XA for every A in mats}. Singular values of the
/// stacked commutator system below 1e-8 count as zero.
inline std::size_t commutant_dimension(std::span<const Eigen::MatrixXcd> mats) {
  if (mats.empty()) throw error(errc::parameter_mismatch, "commutant of an empty family is undefined");
  const Eigen::Index d = mats.front().rows();
  bool all_normal = true;
  for (const auto& a : mats) {
    if (a.rows() != d || a.cols() != d) throw error(errc::parameter_mismatch, "matrices must share one square dimension");
    all_normal = all_normal && detail::is_normal(a);
  }

  const detail::ClusteredBasis cb = all_normal ? detail::eigen_clustering(mats, d) : detail::trivial_clustering(d);

  // Unknowns: elementary matrices E_pq inside each cluster block, in the
  // eigenbasis.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns;
  for (auto [b, e] : cb.clusters)
    for (Eigen::Index p = b; p < e; ++p)
      for (Eigen::Index q = b; q < e; ++q) unknowns.emplace_back(p, q);
  const auto u = static_cast<Eigen::Index>(unknowns.size());

  std::vector<Eigen::MatrixXcd> rotated;
  rotated.reserve(mats.size());
  for (const auto& a : mats) rotated.push_back(cb.basis.adjoint() * a * cb.basis);

  // Column (p,q) of the block for A: vec([A, E_pq]) = vec(A e_p e_q^T - e_p e_q^T A).
  auto fill_block = [&](const Eigen::MatrixXcd& a, Eigen::MatrixXcd& block) {
    block.setZero(d * d, u);
    for (Eigen::Index k = 0; k < u; ++k) {
      const auto [p, q] = unknowns[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < d; ++i) block(q * d + i, k) += a(i, p);   // (A E_pq)_{iq} = A_ip
      for (Eigen::Index j = 0; j < d; ++j) block(j * d + p, k) -= a(q, j);   // (E_pq A)_{pj} = A_qj
    }
  };

  Eigen::MatrixXcd normal = Eigen::MatrixXcd::Zero(u, u);
  Eigen::MatrixXcd block;
  for (const auto& a : rotated) {
    fill_block(a, block);
    normal.noalias() += block.adjoint() * block;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(normal);
  const double top = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 0; i < u; ++i)
    if (eig.eigenvalues()(i) <= 1e-8 * top) candidates.push_back(i);
  if (candidates.empty()) return 0;

  // Squaring loses the small singular values; recover them from the stacked
  // system restricted to the near-null eigenvectors.
  const auto r = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXcd y(u, r);
  for (Eigen::Index c = 0; c < r; ++c) y.col(c) = eig.eigenvectors().col(candidates[static_cast<std::size_t>(c)]);
  Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(rotated.size()) * d * d, r);
  for (std::size_t k = 0; k < rotated.size(); ++k) {
    fill_block(rotated[k], block);
    stacked.middleRows(static_cast<Eigen::Index>(k) * d * d, d * d) = block * y;
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
  const Eigen::MatrixXcd rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rfac);
  std::size_t nullity = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    if (svd.singularValues()(i) < 1e-8) ++nullity;
  return nullity;
}

inline std::size_t commutant_dimension(std::span<const UnitaryMatrix> mats) {
  std::vector<Eigen::MatrixXcd> raw;
  raw.reserve(mats.size());
  for (const auto& u : mats) raw.push_back(u.matrix());
  return commutant_dimension(std::span<const Eigen::MatrixXcd>(raw));
}

}  // namespace equiline
