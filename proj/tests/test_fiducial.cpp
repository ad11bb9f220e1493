#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "equiline/fiducial.hpp"

using namespace equiline;

namespace {

Eigen::VectorXcd random_unit(unsigned d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (unsigned i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

// Welch-equality value: d^2 - 1 overlaps all equal to 1 / (d + 1).
double equality_potential(unsigned d) { return (d * d - 1.0) / ((d + 1.0) * (d + 1.0)); }

}  // namespace

TEST(PauliDisplacements, ApplyMatchesMatrix) {
  const PauliDisplacements ops(4);
  const Eigen::VectorXcd v = random_unit(4, 1);
  for (unsigned g = 0; g < ops.count(); ++g) {
    const Eigen::MatrixXcd m = ops.matrix(g);
    EXPECT_LT((ops.apply(g, v) - m * v).norm(), 1e-15);
    EXPECT_LT((ops.apply_adjoint(g, v) - m.adjoint() * v).norm(), 1e-15);
    EXPECT_LT((m.adjoint() * m - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15);
  }
  EXPECT_THROW(PauliDisplacements(6), error);
}

TEST(FramePotential, BoundIsWelchEquality) {
  for (unsigned d : {2U, 8U}) EXPECT_NEAR(frame_potential_bound(d), equality_potential(d), 1e-15);
}

TEST(FramePotential, KnownValues) {
  // Qubit SIC fiducial: Bloch vector (1, 1, 1) / sqrt(3).
  const double theta = std::acos(1.0 / std::sqrt(3.0));
  Eigen::VectorXcd v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), M_PI / 4);
  EXPECT_NEAR(frame_potential(v), 1.0 / 3.0, 1e-14);
  const PauliDisplacements ops(2);
  for (unsigned g = 1; g < 4; ++g) EXPECT_NEAR(std::norm(v.dot(ops.apply(g, v))), 1.0 / 3.0, 1e-14);

  // A basis state overlaps fully with every Z-type displacement.
  for (unsigned d : {2U, 8U}) EXPECT_NEAR(frame_potential(Eigen::VectorXcd::Unit(d, 0)), d - 1.0, 1e-14);
}

TEST(FramePotential, GradientMatchesCentralDifferences) {
  for (unsigned d : {2U, 8U}) {
    const PauliDisplacements ops(d);
    // Unnormalized point: the potential is homogeneous but the gradient
    // formula holds everywhere.
    const Eigen::VectorXcd v = 1.3 * random_unit(d, 40 + d);
    Eigen::VectorXcd grad;
    frame_potential(ops, v, &grad);
    const double h = 1e-6;
    double worst = 0.0;
    for (unsigned i = 0; i < d; ++i)
      for (int part = 0; part < 2; ++part) {
        const cplx step = part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
        Eigen::VectorXcd plus = v, minus = v;
        plus(i) += step;
        minus(i) -= step;
        const double fd = (frame_potential(ops, plus) - frame_potential(ops, minus)) / (2 * h);
        const double an = part == 0 ? grad(i).real() : grad(i).imag();
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    EXPECT_LT(worst, 1e-5) << "d=" << d;
  }
}

TEST(Search, QubitConvergesAndIsDeterministic) {
  const SearchConfig cfg = SearchConfig::defaults_for(2);
  EXPECT_EQ(cfg.restarts, 8U);
  const SearchReport a = search_fiducial(cfg);
  const SearchReport b = search_fiducial(cfg);
  EXPECT_LT(std::abs(a.potential - 1.0 / 3.0), 1e-10);
  EXPECT_EQ(a.fiducial, b.fiducial);
  EXPECT_EQ(a.best_restart, b.best_restart);

  const LineSet l = orbit_lineset(a.fiducial, 2, cfg.seed);
  EXPECT_EQ(l.n(), 4);
  const AngleCertificate cert = certify_equiangular(gram(l));
  EXPECT_NEAR(cert.alpha * cert.alpha, 1.0 / 3.0, 1e-8);
  ASSERT_TRUE(l.meta());
  EXPECT_EQ(l.meta()->case_tag, "i");
}

TEST(Search, ThreadCountDoesNotChangeResult) {
  SearchConfig cfg = SearchConfig::defaults_for(2);
  cfg.seed = 17;
  cfg.threads = 1;
  const SearchReport one = search_fiducial(cfg);
  cfg.threads = 3;
  const SearchReport three = search_fiducial(cfg);
  EXPECT_EQ(one.fiducial, three.fiducial);
  EXPECT_EQ(one.iterations, three.iterations);
}

TEST(Search, DifferentSeedsDiffer) {
  SearchConfig cfg = SearchConfig::defaults_for(2);
  const SearchReport a = search_fiducial(cfg);
  cfg.seed = 2;
  const SearchReport b = search_fiducial(cfg);
  EXPECT_NE(a.fiducial, b.fiducial);
}

TEST(Search, StarvedBudgetReportsBest) {
  SearchConfig cfg = SearchConfig::defaults_for(2);
  cfg.max_iters = 1;
  try {
    search_fiducial(cfg);
    FAIL() << "expected NotConverged";
  } catch (const not_converged& e) {
    EXPECT_EQ(e.code(), errc::not_converged);
    EXPECT_GT(e.best_excess(), 1e-10);
  }
}

TEST(Search, HoggarDimension) {
  const SearchConfig cfg = SearchConfig::defaults_for(8);
  EXPECT_EQ(cfg.restarts, 64U);
  const SearchReport r = search_fiducial(cfg);
  EXPECT_LT(std::abs(r.potential - 7.0 / 9.0), 1e-8);
  EXPECT_GE(r.converged_restarts, 1U);
  const LineSet l = orbit_lineset(r.fiducial, 8, cfg.seed);
  EXPECT_EQ(l.n(), 64);
  const AngleCertificate cert = certify_equiangular(gram(l), 1e-7);
  EXPECT_NEAR(cert.alpha * cert.alpha, 1.0 / 9.0, 1e-7);
  EXPECT_TRUE(certify_tight(gram(l), 8, 1e-7));
  EXPECT_EQ(dimension_pair(64, 8), 56U);
}

TEST(Search, RejectsUnsupportedDimensions) {
  SearchConfig cfg = SearchConfig::defaults_for(4);
  EXPECT_THROW(search_fiducial(cfg), error);
  cfg = SearchConfig::defaults_for(2);
  cfg.restarts = 0;
  EXPECT_THROW(search_fiducial(cfg), error);
}
