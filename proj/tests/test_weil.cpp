#include <gtest/gtest.h>

#include <random>
#include <set>

#include "equiline/weil.hpp"

using namespace equiline;

namespace {

// SL(2, p) by brute force over all 2x2 matrices.
std::set<FpMatrix> special_linear_2(std::uint32_t p) {
  std::set<FpMatrix> out;
  for (std::uint32_t a = 0; a < p; ++a)
    for (std::uint32_t b = 0; b < p; ++b)
      for (std::uint32_t c = 0; c < p; ++c)
        for (std::uint32_t d = 0; d < p; ++d)
          if ((a * d + p * p - b * c) % p == 1) out.insert(FpMatrix{p, 2, {a, b, c, d}});
  return out;
}

std::vector<FpMatrix> induced_actions(std::uint32_t p, std::uint32_t m) {
  std::vector<FpMatrix> out;
  for (const auto& g : weil_generators(p, m)) out.push_back(induced_symplectic(g, {p, m}).matrix);
  return out;
}

UnitaryMatrix displacement(HeisenbergParams params, std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
  return schroedinger_rep(HeisenbergElement(params, FpVector(params.p, std::move(a)), FpVector(params.p, std::move(b)), 0),
                          1);
}

}  // namespace

TEST(Fourier, IsTheDftForP3) {
  const Eigen::MatrixXcd f = fourier_matrix({3, 1}).matrix();
  const cplx w = std::polar(1.0, 2.0 * M_PI / 3.0);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) EXPECT_LT(std::abs(f(x, y) - std::pow(w, x * y) / std::sqrt(3.0)), 1e-14);
}

TEST(Fourier, ConjugatesTranslationToModulation) {
  const HeisenbergParams params{3, 1};
  const Eigen::MatrixXcd f = fourier_matrix(params).matrix();
  const Eigen::MatrixXcd conj = f * displacement(params, {1}, {0}).matrix() * f.adjoint();
  const auto match = match_displacement(conj, params, 1, 1e-9);
  ASSERT_TRUE(match);
  EXPECT_EQ(match->label / 3, 0U);  // a = 0
  EXPECT_NE(match->label % 3, 0U);  // b = +-1
  EXPECT_NEAR(std::abs(match->phase), 1.0, 1e-12);

  const FpMatrix s = induced_symplectic(fourier_matrix(params), params).matrix;
  // [[0, -1], [1, 0]] or its inverse, depending on the sign convention
  EXPECT_TRUE(s == (FpMatrix{3, 2, {0, 2, 1, 0}}) || s == (FpMatrix{3, 2, {0, 1, 2, 0}}));
}

TEST(QuadraticPhase, InducesTransvection) {
  const HeisenbergParams params{3, 1};
  const FpMatrix s = induced_symplectic(detail::quadratic_phase(params, 0, 0), params).matrix;
  EXPECT_EQ(s(0, 0), 1U);
  EXPECT_EQ(s(0, 1), 0U);
  EXPECT_NE(s(1, 0), 0U);
  EXPECT_EQ(s(1, 1), 1U);
}

TEST(InducedAction, InnerAutomorphismsActTrivially) {
  for (const HeisenbergParams params : {HeisenbergParams{3, 1}, HeisenbergParams{5, 1}, HeisenbergParams{3, 2}})
    for (std::uint64_t label = 0; label < params.carrier_dim() * params.carrier_dim(); label += 2) {
      const auto u = schroedinger_rep(HeisenbergElement::from_label(params, label), 1);
      EXPECT_EQ(induced_symplectic(u, params).matrix, FpMatrix::identity(params.p, 2 * params.m));
    }
}

TEST(InducedAction, RandomUnitaryIsNotNormalizing) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd r(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) r.data()[i] = cplx(g(rng), g(rng));
  const UnitaryMatrix u(Eigen::HouseholderQR<Eigen::MatrixXcd>(r).householderQ());
  try {
    induced_symplectic(u, {3, 1});
    FAIL() << "expected NotNormalizing";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::not_normalizing);
  }
}

TEST(InducedAction, IsAHomomorphismOnRandomWords) {
  std::mt19937_64 rng(5);
  for (const HeisenbergParams params : {HeisenbergParams{5, 1}, HeisenbergParams{3, 2}}) {
    const auto gens = weil_generators(params.p, params.m);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1), len(1, 4);
    for (int t = 0; t < 50; ++t) {
      UnitaryMatrix word = UnitaryMatrix::identity(gens.front().dim());
      FpMatrix action = FpMatrix::identity(params.p, 2 * params.m);
      for (std::size_t k = len(rng); k > 0; --k) {
        const auto& g = gens[pick(rng)];
        word = word * g;
        action = action * induced_symplectic(g, params).matrix;
      }
      EXPECT_EQ(induced_symplectic(word, params).matrix, action);
    }
  }
}

TEST(WeilGenerators, ClosureIsSymplecticGroup) {
  for (std::uint32_t p : {3U, 5U}) {
    const auto closure = matrix_closure(induced_actions(p, 1));
    EXPECT_EQ(closure, special_linear_2(p)) << "p=" << p;
    EXPECT_EQ(closure.size(), symplectic_group_order(p, 1));
  }
  EXPECT_EQ(symplectic_group_order(3, 1), 24U);
}

TEST(WeilGenerators, ClosureForM2) {
  const auto gens = induced_actions(3, 2);
  for (const auto& s : gens) EXPECT_TRUE(preserves_form(s, {3, 2}));
  EXPECT_EQ(matrix_closure(gens).size(), symplectic_group_order(3, 2));
  EXPECT_EQ(symplectic_group_order(3, 2), 51840U);
}

// Words over the generators and their inverses.
TEST(WeilGenerators, ShortWordsReachEverything) {
  for (std::uint32_t p : {3U, 5U}) {
    auto gens = induced_actions(p, 1);
    const std::size_t count = gens.size();
    const FpMatrix id = FpMatrix::identity(p, 2);
    for (std::size_t i = 0; i < count; ++i) {
      FpMatrix power = gens[i], inverse = id;
      while (!(power == id)) {
        inverse = power;
        power = power * gens[i];
      }
      gens.push_back(inverse);
    }
    EXPECT_EQ(matrix_closure(gens, 6), special_linear_2(p)) << "p=" << p;
  }
}

TEST(WeilGenerators, RejectEvenPrime) { EXPECT_THROW(weil_generators(2, 1), error); }

TEST(Parity, EigenspaceDimensions) {
  const std::vector<std::tuple<std::uint32_t, std::uint32_t, Eigen::Index, Eigen::Index>> cases{
      {3, 1, 2, 1}, {5, 1, 3, 2}, {3, 2, 5, 4}};
  for (const auto& [p, m, plus, minus] : cases) {
    const ParitySplit s = parity_split(p, m);
    EXPECT_EQ(s.plus.cols(), plus);
    EXPECT_EQ(s.minus.cols(), minus);
    const Eigen::MatrixXcd par = parity_operator(p, m).matrix();
    EXPECT_LT((par * s.plus - s.plus).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((par * s.minus + s.minus).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::MatrixXcd both(s.plus.rows(), s.plus.rows());
    both << s.plus, s.minus;
    EXPECT_LT((both.adjoint() * both - Eigen::MatrixXcd::Identity(both.cols(), both.cols())).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(Parity, WeilGeneratorsPreserveEigenspaces) {
  for (auto [p, m] : {std::pair{3U, 1U}, std::pair{5U, 1U}, std::pair{3U, 2U}}) {
    const Eigen::MatrixXcd par = parity_operator(p, m).matrix();
    for (const auto& g : weil_generators(p, m))
      EXPECT_LT((g.matrix() * par - par * g.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Primitive, Roots) {
  EXPECT_EQ(primitive_root(3), 2U);
  EXPECT_EQ(primitive_root(5), 2U);
  EXPECT_EQ(primitive_root(7), 3U);
}
