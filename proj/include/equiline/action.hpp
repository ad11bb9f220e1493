#pragma once

// Permutation actions of symmetry unitaries on a LineSet and the
// certificates built on them: 2-transitivity, group order, the multiplicity
// of the line character, and triviality of the commutant.

#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equiline/errors.hpp"
#include "equiline/fiducial.hpp"
#include "equiline/heisenberg.hpp"
#include "equiline/lineset.hpp"

namespace equiline {

// ---------------------------------------------------------------------------
// PermutationWord

class PermutationWord {
 public:
  PermutationWord() = default;

  explicit PermutationWord(std::vector<std::uint32_t> images) : images_(std::move(images)) {
    std::vector<bool> hit(images_.size(), false);
    for (auto i : images_) {
      if (i >= images_.size() || hit[i]) throw error(errc::not_a_symmetry, "images do not form a bijection");
      hit[i] = true;
    }
  }

  static PermutationWord identity(std::size_t n) {
    std::vector<std::uint32_t> im(n);
    for (std::size_t i = 0; i < n; ++i) im[i] = static_cast<std::uint32_t>(i);
    return PermutationWord(std::move(im), trusted{});
  }

  std::size_t degree() const noexcept { return images_.size(); }
  std::uint32_t operator[](std::size_t i) const { return images_[i]; }
  const std::vector<std::uint32_t>& images() const noexcept { return images_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  /// Function composition: (p * q)(i) = p(q(i)).
  PermutationWord operator*(const PermutationWord& q) const {
    if (q.degree() != degree()) throw error(errc::parameter_mismatch, "composing permutations of different degree");
    std::vector<std::uint32_t> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i) im[i] = images_[q.images_[i]];
    return PermutationWord(std::move(im), trusted{});
  }

  PermutationWord inverse() const {
    std::vector<std::uint32_t> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i) im[images_[i]] = static_cast<std::uint32_t>(i);
    return PermutationWord(std::move(im), trusted{});
  }

  friend bool operator==(const PermutationWord&, const PermutationWord&) = default;

 private:
  struct trusted {};
  PermutationWord(std::vector<std::uint32_t> images, trusted) : images_(std::move(images)) {}

  std::vector<std::uint32_t> images_;
};

/// i -> the unique j with |<U v_i, v_j>| >= 1 - tol.
inline PermutationWord induced_permutation(const LineSet& l, const UnitaryMatrix& u, double tol = 1e-8) {
  if (u.dim() != l.d()) throw error(errc::parameter_mismatch, "unitary does not act on the line space");
  const Eigen::MatrixXcd overlaps = l.vectors().adjoint() * (u.matrix() * l.vectors());  // (j, i)
  const Eigen::Index n = l.n();
  std::vector<std::uint32_t> images(static_cast<std::size_t>(n));
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index match = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(overlaps(j, i)) < 1.0 - tol) continue;
      if (match >= 0) throw error(errc::not_a_symmetry, "line " + std::to_string(i) + " matches two lines");
      match = j;
    }
    if (match < 0) throw error(errc::not_a_symmetry, "image of line " + std::to_string(i) + " is not in the set");
    if (hit[static_cast<std::size_t>(match)])
      throw error(errc::not_a_symmetry, "two lines map to line " + std::to_string(match));
    hit[static_cast<std::size_t>(match)] = true;
    images[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(match);
  }
  return PermutationWord(std::move(images));
}

inline std::size_t common_degree(const std::vector<PermutationWord>& gens) {
  if (gens.empty()) throw error(errc::parameter_mismatch, "need at least one generator");
  const std::size_t n = gens.front().degree();
  for (const auto& g : gens)
    if (g.degree() != n) throw error(errc::parameter_mismatch, "generators have different degrees");
  return n;
}

inline std::size_t orbit_size(const std::vector<PermutationWord>& gens, std::uint32_t point) {
  const std::size_t n = common_degree(gens);
  std::vector<bool> seen(n, false);
  std::deque<std::uint32_t> queue{point};
  seen[point] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (const auto& g : gens)
      if (!seen[g[x]]) {
        seen[g[x]] = true;
        ++count;
        queue.push_back(g[x]);
      }
  }
  return count;
}

/// Orbit of the ordered pair (0, 1) has size n(n - 1).
inline bool two_transitivity(const std::vector<PermutationWord>& gens) {
  const std::size_t n = common_degree(gens);
  if (n < 2) return false;
  std::vector<bool> seen(n * n, false);
  std::deque<std::pair<std::uint32_t, std::uint32_t>> queue{{0, 1}};
  seen[1] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      const std::size_t key = std::size_t{g[x]} * n + g[y];
      if (!seen[key]) {
        seen[key] = true;
        ++count;
        queue.emplace_back(g[x], g[y]);
      }
    }
  }
  return count == n * (n - 1);
}

// ---------------------------------------------------------------------------
// Stabilizer chain (deterministic Schreier-Sims, base 0, 1, 2, ...)

class StabilizerChain {
 public:
  explicit StabilizerChain(std::size_t n) : n_(n), levels_(n) {
    for (std::size_t k = 0; k < n; ++k) {
      levels_[k].transversal.resize(n);
      levels_[k].inverse.resize(n);
      levels_[k].transversal[k] = PermutationWord::identity(n);
      levels_[k].inverse[k] = PermutationWord::identity(n);
      levels_[k].orbit.push_back(static_cast<std::uint32_t>(k));
    }
  }

  std::size_t degree() const noexcept { return n_; }

  bool contains(const PermutationWord& g) const { return strip(0, g).first == n_; }

  /// Adds g to the group; returns false when it was already a member.
  bool add(const PermutationWord& g) {
    if (g.degree() != n_) throw error(errc::parameter_mismatch, "generator degree mismatch");
    if (contains(g)) return false;
    sift(0, g);
    return true;
  }

  std::uint64_t order() const {
    std::uint64_t order = 1;
    for (const auto& level : levels_)
      if (__builtin_mul_overflow(order, level.orbit.size(), &order))
        throw error(errc::group_too_large, "group order exceeds 64 bits");
    return order;
  }

  std::vector<std::size_t> orbit_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& level : levels_) out.push_back(level.orbit.size());
    return out;
  }

 private:
  struct Level {
    std::vector<PermutationWord> gens;
    std::vector<std::optional<PermutationWord>> transversal;  // u_t(k) = t
    std::vector<std::optional<PermutationWord>> inverse;
    std::vector<std::uint32_t> orbit;
  };

  // Divides g by transversal elements from level k on. Returns the first
  // level whose orbit misses the image, or n when g reduces to the identity.
  std::pair<std::size_t, PermutationWord> strip(std::size_t k, PermutationWord g) const {
    for (; k < n_; ++k) {
      if (g.is_identity()) return {n_, std::move(g)};
      const auto t = g[k];
      if (!levels_[k].transversal[t]) return {k, std::move(g)};
      g = *levels_[k].inverse[t] * g;
    }
    return {n_, std::move(g)};
  }

  // The residue fixes every base point before its level, so it joins the
  // generating sets of all levels from k down to there, deepest first.
  void sift(std::size_t k, PermutationWord g) {
    auto [j, h] = strip(k, std::move(g));
    if (j == n_) return;
    for (std::size_t l = j + 1; l-- > k;) add_generator(l, h);
  }

  void add_generator(std::size_t k, PermutationWord s) {
    Level& level = levels_[k];
    level.gens.push_back(s);
    // Schreier generators of the new generator with every known orbit point,
    // then close the orbit under all generators.
    std::deque<std::pair<std::uint32_t, std::size_t>> work;  // (point, generator index)
    for (auto t : level.orbit) work.emplace_back(t, level.gens.size() - 1);
    while (!work.empty()) {
      const auto [t, gi] = work.front();
      work.pop_front();
      const PermutationWord h = level.gens[gi] * *level.transversal[t];
      const auto image = h[k];
      if (level.transversal[image]) {
        sift(k + 1, *level.inverse[image] * h);
      } else {
        level.transversal[image] = h;
        level.inverse[image] = h.inverse();
        level.orbit.push_back(image);
        for (std::size_t j = 0; j < level.gens.size(); ++j) work.emplace_back(image, j);
      }
    }
  }

  std::size_t n_;
  std::vector<Level> levels_;
};

inline std::uint64_t group_order(const std::vector<PermutationWord>& gens) {
  StabilizerChain chain(common_degree(gens));
  for (const auto& g : gens) chain.add(g);
  return chain.order();
}

// ---------------------------------------------------------------------------
// Finite unitary groups

/// All products of the generators, identifying matrices whose entries agree
/// on a 1e-6 grid.
inline std::vector<UnitaryMatrix> close_unitary_group(const std::vector<UnitaryMatrix>& gens,
                                                      std::size_t max_order = 200'000) {
  if (gens.empty()) throw error(errc::parameter_mismatch, "need at least one generator");
  auto key = [](const Eigen::MatrixXcd& m) {
    std::vector<long long> k;
    k.reserve(static_cast<std::size_t>(2 * m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      k.push_back(std::llround(m.data()[i].real() * 1e6));
      k.push_back(std::llround(m.data()[i].imag() * 1e6));
    }
    return k;
  };
  std::vector<UnitaryMatrix> elements{UnitaryMatrix::identity(gens.front().dim())};
  std::map<std::vector<long long>, std::size_t> seen{{key(elements.front().matrix()), 0}};
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (const auto& g : gens) {
      UnitaryMatrix next = g * elements[i];
      if (seen.emplace(key(next.matrix()), elements.size()).second) {
        elements.push_back(std::move(next));
        if (elements.size() > max_order) throw error(errc::group_too_large, "unitary group closure too large");
      }
    }
  return elements;
}

/// lambda(h) = <v_line, U_h v_line>; each U_h must fix the line.
inline std::vector<cplx> line_character(const LineSet& l, Eigen::Index line, const std::vector<UnitaryMatrix>& group,
                                        double tol = 1e-8) {
  const Eigen::VectorXcd v = l.vectors().col(line);
  std::vector<cplx> out;
  for (const auto& h : group) {
    const cplx c = v.dot(h.matrix() * v);
    if (std::abs(std::abs(c) - 1.0) > tol) throw error(errc::not_a_symmetry, "unitary does not stabilize the line");
    out.push_back(c);
  }
  return out;
}

struct MultiplicityCertificate {
  std::size_t rank = 0;
  bool range_is_line = false;  // the projector is exactly |v_0><v_0|
};

/// Rank of (1/|H|) sum_h conj(lambda(h)) U_h, the projector onto the
/// lambda-isotypic part of V restricted to H.
inline MultiplicityCertificate multiplicity_certificate(const LineSet& l, const std::vector<UnitaryMatrix>& group,
                                                        const std::vector<cplx>& phases) {
  if (group.empty() || group.size() != phases.size())
    throw error(errc::parameter_mismatch, "need one phase per group element");
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(l.d(), l.d());
  for (std::size_t i = 0; i < group.size(); ++i) proj += std::conj(phases[i]) * group[i].matrix();
  proj /= static_cast<double>(group.size());
  const double defect = (proj * proj - proj).cwiseAbs().maxCoeff();
  if (defect > 1e-6) throw error(errc::not_a_projector, "idempotency defect " + std::to_string(defect));

  MultiplicityCertificate cert;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(proj);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-7) ++cert.rank;
  const Eigen::VectorXcd v = l.vectors().col(0);
  cert.range_is_line = cert.rank == 1 && (proj * v - v).norm() < 1e-6;
  return cert;
}

/// Any unitary fixing every line is scalar: the commutant of the line
/// projectors is one-dimensional.
inline std::size_t projector_commutant_dimension(const LineSet& l) {
  std::vector<Eigen::MatrixXcd> projectors;
  projectors.reserve(static_cast<std::size_t>(l.n()));
  for (Eigen::Index i = 0; i < l.n(); ++i) projectors.push_back(l.vectors().col(i) * l.vectors().col(i).adjoint());
  return commutant_dimension(std::span<const Eigen::MatrixXcd>(projectors));
}

inline bool scalar_kernel_check(const LineSet& l) { return projector_commutant_dimension(l) == 1; }

// ---------------------------------------------------------------------------
// Stabilizer detection for Pauli orbits

namespace detail {

inline unsigned symplectic_f2(std::uint32_t x, std::uint32_t y, unsigned m) {
  const std::uint32_t mask = (1U << m) - 1;
  const std::uint32_t ax = x >> m, bx = x & mask, ay = y >> m, by = y & mask;
  return static_cast<unsigned>((std::popcount(ax & by) + std::popcount(bx & ay)) & 1);
}

/// Unitary realizing pi on a tight frame: U = (d/n) sum_x c_x v_{pi x} v_x^*,
/// projected onto the unitary group to absorb rounding in the lines.
inline UnitaryMatrix unitary_from_permutation(const LineSet& l, const Eigen::MatrixXcd& g, const PermutationWord& pi) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(l.d(), l.d());
  for (Eigen::Index x = 0; x < l.n(); ++x) {
    const auto px = static_cast<Eigen::Index>(pi[static_cast<std::size_t>(x)]);
    const cplx c = x == 0 ? cplx(1.0) : g(0, x) / g(0, px);
    u += c * l.vectors().col(px) * l.vectors().col(x).adjoint();
  }
  u *= static_cast<double>(l.d()) / static_cast<double>(l.n());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return UnitaryMatrix(svd.matrixU() * svd.matrixV().adjoint());
}

}  // namespace detail

/// Symplectic relabelings (a, b) -> M(a, b) of a Pauli orbit of d = 2^m lines
/// that are induced by a unitary fixing line 0. A relabeling is realizable
/// iff every Bargmann invariant G(0,x) G(x,y) G(y,0) is preserved. Returns
/// unitaries for a generating set of the stabilizer's permutation image.
inline std::vector<UnitaryMatrix> detect_orbit_stabilizer(const LineSet& l, unsigned m, double tol = 1e-6) {
  const std::uint32_t n = 1U << (2 * m);
  if (l.n() != static_cast<Eigen::Index>(n) || l.d() != static_cast<Eigen::Index>(1U << m))
    throw error(errc::parameter_mismatch, "not a Pauli orbit of the expected size");
  const Eigen::MatrixXcd g = l.vectors().adjoint() * l.vectors();
  auto bargmann = [&](std::uint32_t x, std::uint32_t y) { return g(0, x) * g(x, y) * g(y, 0); };

  const unsigned rank = 2 * m;
  std::vector<std::uint32_t> basis(rank), images(rank);
  for (unsigned k = 0; k < rank; ++k) basis[k] = 1U << (rank - 1 - k);

  std::vector<std::int64_t> img(n, -1);
  std::vector<bool> used(n, false);
  img[0] = 0;
  used[0] = true;
  std::vector<std::uint32_t> span{0};
  std::vector<PermutationWord> found;

  auto search = [&](auto&& self, unsigned k) -> void {
    if (k == rank) {
      std::vector<std::uint32_t> perm(n);
      for (std::uint32_t x = 0; x < n; ++x) perm[x] = static_cast<std::uint32_t>(img[x]);
      found.emplace_back(std::move(perm));
      return;
    }
    const std::size_t old_size = span.size();
    for (std::uint32_t w = 1; w < n; ++w) {
      if (used[w]) continue;
      bool ok = true;
      for (unsigned i = 0; i < k && ok; ++i)
        ok = detail::symplectic_f2(w, images[i], m) == detail::symplectic_f2(basis[k], basis[i], m);
      if (!ok) continue;

      for (std::size_t s = 0; s < old_size && ok; ++s) {
        const std::uint32_t y = span[s] ^ basis[k];
        const auto iy = static_cast<std::uint32_t>(img[span[s]]) ^ w;
        if (used[iy]) {
          ok = false;
          break;
        }
        img[y] = iy;
        used[iy] = true;
        span.push_back(y);
        for (std::uint32_t z : span)
          if (std::abs(bargmann(iy, static_cast<std::uint32_t>(img[z])) - bargmann(y, z)) > tol) {
            ok = false;
            break;
          }
      }
      if (ok) {
        images[k] = w;
        self(self, k + 1);
      }
      while (span.size() > old_size) {
        used[static_cast<std::size_t>(img[span.back()])] = false;
        img[span.back()] = -1;
        span.pop_back();
      }
    }
  };
  search(search, 0);

  StabilizerChain chain(n);
  std::vector<UnitaryMatrix> out;
  for (const auto& pi : found)
    if (chain.add(pi)) out.push_back(detail::unitary_from_permutation(l, g, pi));
  return out;
}

// ---------------------------------------------------------------------------
// Symmetries by construction, and the action certificate

inline SymmetryGenerators symmetry_generators(const LineSet& l) {
  if (!l.meta()) throw error(errc::bad_input, "line set carries no construction metadata");
  const ConstructionMeta& meta = *l.meta();
  if (meta.case_tag == "iii") {
    const auto type = meta.choice == "plus" ? HyperplaneType::Plus : HyperplaneType::Minus;
    return case_iii_symmetries(meta.m, type);
  }
  if (meta.case_tag == "iv") return case_iv_symmetries(meta.p, meta.m, meta.choice == "plus" ? Parity::Plus : Parity::Minus);
  if (meta.case_tag == "i" || meta.case_tag == "ii") {
    const PauliDisplacements ops(1U << meta.m);
    SymmetryGenerators out;
    for (unsigned k = 0; k < 2 * meta.m; ++k) out.translations.emplace_back(ops.matrix(1U << k));
    out.stabilizer = detect_orbit_stabilizer(l, meta.m);
    return out;
  }
  throw error(errc::unknown_case, "unknown construction tag '" + meta.case_tag + "'");
}

struct ActionCertificate {
  std::vector<PermutationWord> generators;
  bool transitive = false;
  bool two_transitive = false;
  std::uint64_t group_order = 0;
  std::size_t matched_unitaries = 0;
};

inline ActionCertificate certify_action(const LineSet& l, double tol = 1e-8) {
  const SymmetryGenerators sym = symmetry_generators(l);
  ActionCertificate cert;
  for (const auto* family : {&sym.translations, &sym.stabilizer})
    for (const auto& u : *family) {
      cert.generators.push_back(induced_permutation(l, u, tol));
      ++cert.matched_unitaries;
    }
  cert.transitive = orbit_size(cert.generators, 0) == static_cast<std::size_t>(l.n());
  cert.two_transitive = two_transitivity(cert.generators);
  cert.group_order = group_order(cert.generators);
  return cert;
}

}  // namespace equiline
