#pragma once

// Frame-potential search for Heisenberg-covariant fiducials over the
// multi-qubit Pauli group, d = 2^m. The orbit of a minimizer is a set of d^2
// equiangular lines.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <ceres/ceres.h>

#include "equiline/errors.hpp"
#include "equiline/heisenberg.hpp"
#include "equiline/lineset.hpp"

namespace equiline {

/// The d^2 Pauli displacements X(a)Z(b) on C^d, d = 2^m, as monomial maps:
/// (D v)[x ^ a] = sign(x) v[x]. Label a * d + b.
class PauliDisplacements {
 public:
  explicit PauliDisplacements(unsigned d) : d_(d) {
    if (d < 2 || !std::has_single_bit(d)) throw error(errc::parameter_mismatch, "dimension must be a power of two");
    for (unsigned a = 0; a < d; ++a)
      for (unsigned b = 0; b < d; ++b) {
        std::vector<double> sign(d);
        for (unsigned x = 0; x < d; ++x) sign[x] = (std::popcount(b & x) & 1) ? -1.0 : 1.0;
        shifts_.push_back(a);
        signs_.push_back(std::move(sign));
      }
  }

  unsigned d() const noexcept { return d_; }
  unsigned count() const noexcept { return d_ * d_; }

  Eigen::VectorXcd apply(unsigned label, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(d_);
    const unsigned a = shifts_[label];
    for (unsigned x = 0; x < d_; ++x) out(x ^ a) = signs_[label][x] * v(x);
    return out;
  }

  Eigen::VectorXcd apply_adjoint(unsigned label, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(d_);
    const unsigned a = shifts_[label];
    for (unsigned x = 0; x < d_; ++x) out(x) = signs_[label][x] * v(x ^ a);
    return out;
  }

  Eigen::MatrixXcd matrix(unsigned label) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d_, d_);
    for (unsigned x = 0; x < d_; ++x) m(x ^ shifts_[label], x) = signs_[label][x];
    return m;
  }

 private:
  unsigned d_;
  std::vector<unsigned> shifts_;
  std::vector<std::vector<double>> signs_;
};

/// (d - 1) / (d + 1).
inline double frame_potential_bound(unsigned d) { return (d - 1.0) / (d + 1.0); }

/// sum over nontrivial displacements of |<v, D v>|^4. When `gradient` is
/// given it receives df/d(conj v) scaled by 2, i.e. the real gradient packed
/// as re + i im.
inline double frame_potential(const PauliDisplacements& ops, const Eigen::VectorXcd& v,
                              Eigen::VectorXcd* gradient = nullptr) {
  if (static_cast<unsigned>(v.size()) != ops.d()) throw error(errc::parameter_mismatch, "vector dimension mismatch");
  double f = 0.0;
  if (gradient) gradient->setZero(v.size());
  for (unsigned g = 1; g < ops.count(); ++g) {
    const Eigen::VectorXcd dv = ops.apply(g, v);
    const cplx c = v.dot(dv);  // conj(v) . D v
    const double c2 = std::norm(c);
    f += c2 * c2;
    if (gradient) *gradient += 4.0 * c2 * (std::conj(c) * dv + c * ops.apply_adjoint(g, v));
  }
  return f;
}

inline double frame_potential(const Eigen::VectorXcd& v) {
  return frame_potential(PauliDisplacements(static_cast<unsigned>(v.size())), v);
}

struct SearchConfig {
  unsigned d = 2;
  unsigned restarts = 8;
  unsigned max_iters = 5000;
  std::uint64_t seed = 1;
  double target_tol = 1e-10;
  unsigned threads = 0;  // 0: EQUILINE_THREADS or hardware concurrency

  static SearchConfig defaults_for(unsigned d) {
    SearchConfig c;
    c.d = d;
    c.restarts = d == 2 ? 8 : 64;
    return c;
  }
};

struct SearchReport {
  Eigen::VectorXcd fiducial;
  double potential = 0.0;
  double excess = 0.0;  // potential - (d - 1)/(d + 1)
  unsigned best_restart = 0;
  unsigned converged_restarts = 0;
  std::vector<unsigned> iterations;  // per restart
};

namespace detail {

class FramePotentialCost final : public ceres::FirstOrderFunction {
 public:
  explicit FramePotentialCost(const PauliDisplacements& ops) : ops_(ops) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const unsigned d = ops_.d();
    Eigen::VectorXcd v(d);
    for (unsigned i = 0; i < d; ++i) v(i) = cplx(parameters[2 * i], parameters[2 * i + 1]);
    Eigen::VectorXcd grad;
    cost[0] = frame_potential(ops_, v, gradient ? &grad : nullptr);
    if (gradient)
      for (unsigned i = 0; i < d; ++i) {
        gradient[2 * i] = grad(i).real();
        gradient[2 * i + 1] = grad(i).imag();
      }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(2 * ops_.d()); }

 private:
  const PauliDisplacements& ops_;
};

inline unsigned worker_count(unsigned requested, unsigned jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("EQUILINE_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::max(1U, std::thread::hardware_concurrency());
  return std::max(1U, std::min(n, jobs));
}

struct RestartResult {
  Eigen::VectorXcd v;
  double potential = 0.0;
  unsigned iterations = 0;
};

inline RestartResult run_restart(const PauliDisplacements& ops, const SearchConfig& cfg, unsigned restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), restart};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  const unsigned d = ops.d();
  std::vector<double> x(2 * d);
  for (auto& xi : x) xi = gauss(rng);
  double norm = 0.0;
  for (double xi : x) norm += xi * xi;
  norm = std::sqrt(norm);
  for (auto& xi : x) xi /= norm;

  ceres::GradientProblem problem(new FramePotentialCost(ops), new ceres::HomogeneousVectorParameterization(2 * d));
  ceres::GradientProblemSolver::Options options;
  options.max_num_iterations = static_cast<int>(cfg.max_iters);
  options.function_tolerance = 1e-16;
  options.gradient_tolerance = 1e-15;
  options.parameter_tolerance = 1e-16;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, x.data(), &summary);

  RestartResult out;
  out.v.resize(d);
  for (unsigned i = 0; i < d; ++i) out.v(i) = cplx(x[2 * i], x[2 * i + 1]);
  out.v.normalize();
  out.potential = frame_potential(ops, out.v);
  out.iterations = static_cast<unsigned>(summary.iterations.size());
  return out;
}

}  // namespace detail

/// Multi-restart local minimization of the frame potential on the unit
/// sphere. The winner is the restart with the least (potential, index), so
/// the result does not depend on scheduling.
inline SearchReport search_fiducial(const SearchConfig& cfg) {
  if (cfg.d != 2 && cfg.d != 8) throw error(errc::parameter_mismatch, "fiducial search supports d = 2 or d = 8");
  if (cfg.restarts == 0 || !(cfg.target_tol > 0.0))
    throw error(errc::parameter_mismatch, "need at least one restart and a positive target tolerance");
  const PauliDisplacements ops(cfg.d);
  std::vector<detail::RestartResult> results(cfg.restarts);

  const unsigned workers = detail::worker_count(cfg.threads, cfg.restarts);
  if (workers == 1) {
    for (unsigned r = 0; r < cfg.restarts; ++r) results[r] = detail::run_restart(ops, cfg, r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (unsigned r = w; r < cfg.restarts; r += workers) results[r] = detail::run_restart(ops, cfg, r);
      });
    for (auto& t : pool) t.join();
  }

  const double bound = frame_potential_bound(cfg.d);
  SearchReport report;
  unsigned best = 0;
  for (unsigned r = 0; r < cfg.restarts; ++r) {
    report.iterations.push_back(results[r].iterations);
    if (results[r].potential - bound <= cfg.target_tol) ++report.converged_restarts;
    if (results[r].potential < results[best].potential) best = r;
  }
  report.best_restart = best;
  report.fiducial = results[best].v;
  report.potential = results[best].potential;
  report.excess = report.potential - bound;
  if (report.excess > cfg.target_tol) throw not_converged(report.excess);
  return report;
}

/// Columns D(a, b) v over all d^2 labels in lexicographic order.
inline LineSet orbit_lineset(const Eigen::VectorXcd& v, unsigned d, std::uint64_t seed = 0) {
  const PauliDisplacements ops(d);
  if (static_cast<unsigned>(v.size()) != d) throw error(errc::parameter_mismatch, "fiducial dimension mismatch");
  Eigen::MatrixXcd cols(d, ops.count());
  const Eigen::VectorXcd unit = v.normalized();
  for (unsigned g = 0; g < ops.count(); ++g) cols.col(g) = ops.apply(g, unit);
  const auto m = static_cast<std::uint32_t>(std::countr_zero(d));
  return LineSet(std::move(cols), ConstructionMeta{d == 2 ? "i" : "ii", 2, m, "", seed});
}

}  // namespace equiline
