// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
// Line sets go through the same serialize/parse round trip the CLI uses, so
// what is certified here is what `equiline construct` writes.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "equiline/equiline.hpp"

using namespace equiline;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

// Line sets built by criteria 1-6, reused by 8-10.
std::map<std::string, LineSet> built;

LineSet keep(const std::string& key, const LineSet& l) {
  LineSet back = parse_lineset(serialize_lineset(l)).lines;
  built.insert_or_assign(key, back);
  return back;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome exact_case_iii(unsigned m, HyperplaneType type, Eigen::Index d, long den) {
  const LineSet l = keep("iii/" + std::to_string(m) + "/" + to_string(type), construct_case_iii(m, type));
  const CertifyReport rep = certify_lineset(l);
  const Eigen::Index n = Eigen::Index{1} << (2 * m);
  std::ostringstream s;
  s << "n=" << l.n() << " d=" << l.d();
  if (!rep.angle) return {false, s.str() + " " + rep.failure_detail};
  s << " alpha=" << rep.angle->numerator << "/" << rep.angle->denominator << " max_dev=" << rep.angle->max_dev;
  const bool ok = rep.pass() && l.n() == n && l.d() == d && rep.angle->exact && rep.angle->max_dev == 0.0 &&
                  rep.angle->numerator == 1 && rep.angle->denominator == den && welch_exact(*rep.angle, n, d);
  return {ok, s.str()};
}

Outcome numeric_case_iv(std::uint32_t p, std::uint32_t m, Parity choice, Eigen::Index d, double alpha, double tol) {
  const LineSet l =
      keep("iv/" + std::to_string(p) + "/" + std::to_string(m) + "/" + to_string(choice), construct_case_iv(p, m, choice));
  const CertifyReport rep = certify_lineset(l, tol);
  std::ostringstream s;
  s << "p=" << p << " n=" << l.n() << " d=" << l.d();
  if (!rep.angle) return {false, s.str() + " " + rep.failure_detail};
  const double err = std::abs(rep.angle->alpha - alpha);
  s << " |alpha-" << num(alpha) << "|=" << num(err);
  const bool ok = rep.pass() && l.n() == static_cast<Eigen::Index>(ipow(p, 2 * m)) && l.d() == d && err < tol &&
                  std::abs(rep.welch_residual) < tol;
  return {ok, s.str()};
}

Outcome combine(std::initializer_list<Outcome> parts) {
  Outcome all{true, ""};
  for (const auto& o : parts) {
    all.ok = all.ok && o.ok;
    all.detail += (all.detail.empty() ? "" : "; ") + o.detail;
  }
  return all;
}

Outcome searched(unsigned d, double potential_tol, double alpha_tol) {
  const SearchConfig cfg = SearchConfig::defaults_for(d);
  const SearchReport a = search_fiducial(cfg);
  const SearchReport b = search_fiducial(cfg);
  const double target = (d - 1.0) / (d + 1.0);
  const LineSet l = keep(d == 2 ? "i" : "ii", orbit_lineset(a.fiducial, d, cfg.seed));
  const AngleCertificate cert = certify_equiangular(gram(l), alpha_tol);
  const double alpha_err = std::abs(cert.alpha * cert.alpha - 1.0 / (d + 1.0));
  const bool tight = certify_tight(gram(l), d, alpha_tol);
  std::ostringstream s;
  s << "d=" << d << " |potential-target|=" << num(std::abs(a.potential - target)) << " |alpha^2-1/" << d + 1
    << "|=" << num(alpha_err) << " converged " << a.converged_restarts << "/" << cfg.restarts;
  const bool ok = a.fiducial == b.fiducial && std::abs(a.potential - target) < potential_tol && alpha_err < alpha_tol &&
                  tight && l.n() == static_cast<Eigen::Index>(d * d);
  return {ok, s.str()};
}

// Singular vectors of x0^2 + x1 x2 + ... counted by brute force for every
// hyperplane avoiding the radical.
Outcome census() {
  std::ostringstream s;
  bool ok = true;
  for (unsigned m = 1; m <= 4; ++m) {
    const unsigned dim = 2 * m + 1;
    const std::uint64_t top = std::uint64_t{1} << (dim - 1), all = std::uint64_t{1} << dim;
    auto q = [&](std::uint64_t x) {
      unsigned v = static_cast<unsigned>((x >> (dim - 1)) & 1U);
      for (unsigned i = 1; i < dim; i += 2) v ^= static_cast<unsigned>((x >> (dim - 1 - i)) & (x >> (dim - 2 - i)) & 1U);
      return v;
    };
    std::uint64_t minus = 0, plus = 0;
    for (std::uint64_t phi = top; phi < all; ++phi) {
      std::uint64_t singular = 0;
      for (std::uint64_t x = 1; x < all; ++x) singular += !(std::popcount(phi & x) & 1) && q(x) == 0;
      (singular < (std::uint64_t{1} << (2 * m - 1)) ? minus : plus)++;
    }
    const QuadForm2 form = standard_form(m);
    const std::uint64_t lib_minus = enumerate_hyperplanes(form, HyperplaneType::Minus).size();
    const std::uint64_t lib_plus = enumerate_hyperplanes(form, HyperplaneType::Plus).size();
    const std::uint64_t half = std::uint64_t{1} << (m - 1), full = std::uint64_t{1} << m;
    ok = ok && minus == half * (full - 1) && plus == half * (full + 1) && lib_minus == minus && lib_plus == plus;
    s << (m > 1 ? " " : "") << "m=" << m << ":" << lib_minus << "/" << lib_plus;
  }
  return {ok, s.str()};
}

Outcome two_transitive() {
  std::ostringstream s;
  bool ok = built.size() == 12;
  s << built.size() << " sets";
  for (const auto& [key, l] : built) {
    const ActionCertificate cert = certify_action(l);
    std::vector<PermutationWord> translations;
    for (const auto& u : symmetry_generators(l).translations) translations.push_back(induced_permutation(l, u));
    const bool translations_only = two_transitivity(translations);
    ok = ok && cert.two_transitive && !translations_only;
    if (!cert.two_transitive || translations_only) s << "; " << key << " wrong";
    if (key == "iii/2/minus") {
      ok = ok && cert.group_order == 11520;
      s << "; iii m=2 order " << cert.group_order;
    }
    if (key == "iv/3/1/minus") {
      ok = ok && cert.group_order == 216;
      s << "; iv p=3 order " << cert.group_order;
    }
  }
  return {ok, s.str()};
}

Outcome multiplicity() {
  std::ostringstream s;
  bool ok = true;
  auto check = [&](const std::string& label, const LineSet& l, std::vector<UnitaryMatrix> gens) {
    const auto group = close_unitary_group(gens);
    const MultiplicityCertificate cert = multiplicity_certificate(l, group, line_character(l, 0, group));
    ok = ok && cert.rank == 1 && cert.range_is_line;
    s << label << " |H|=" << group.size() << " rank " << cert.rank << (cert.range_is_line ? " on the line; " : "; ");
  };
  const LineSet iii = construct_case_iii(2, HyperplaneType::Minus);
  auto gens = case_iii_symmetries(2, HyperplaneType::Minus).stabilizer;
  gens.emplace_back(-Eigen::MatrixXcd::Identity(iii.d(), iii.d()));  // the radical acts by -1
  check("iii m=2", iii, gens);
  check("iv p=3", construct_case_iv(3, 1, Parity::Minus), case_iv_symmetries(3, 1, Parity::Minus).stabilizer);

  std::size_t pairs = 0;
  for (std::uint64_t n = 2; n <= 4096; ++n)
    for (const auto& c : theorem_cases(n)) {
      ok = ok && c.d_small + c.d_large == c.n;
      ++pairs;
    }
  for (const auto& [key, l] : built) {
    const auto other = dimension_pair(static_cast<std::uint64_t>(l.n()), static_cast<std::uint64_t>(l.d()));
    ok = ok && other + static_cast<std::uint64_t>(l.d()) == static_cast<std::uint64_t>(l.n());
  }
  s << "d+d'=n on " << pairs << " table rows and " << built.size() << " sets";
  return {ok, s.str()};
}

Outcome commutant() {
  std::ostringstream s;
  bool ok = !built.empty();
  std::size_t checked = 0;
  for (const auto& [key, l] : built) {
    if (l.n() > 81) continue;
    const std::size_t dim = projector_commutant_dimension(l);
    ok = ok && dim == 1;
    if (dim != 1) s << key << " dim " << dim << "; ";
    ++checked;
  }
  s << checked << " sets with commutant dimension 1";
  return {ok, s.str()};
}

Outcome representation() {
  std::mt19937_64 rng(2024);
  double hom = 0.0, central = 0.0;
  for (const HeisenbergParams params :
       {HeisenbergParams{3, 1}, HeisenbergParams{5, 1}, HeisenbergParams{3, 2}, HeisenbergParams{2, 3}}) {
    const std::uint32_t k = params.phase_modulus();
    const auto q = static_cast<Eigen::Index>(params.carrier_dim());
    for (std::uint32_t j = 1; j < k; ++j) {
      if (params.p == 2 && j == 2) continue;
      for (int t = 0; t < 200; ++t) {
        const auto x = random_element(params, rng), y = random_element(params, rng);
        const Eigen::MatrixXcd lhs = schroedinger_rep(x, j).matrix() * schroedinger_rep(y, j).matrix();
        hom = std::max(hom, (lhs - schroedinger_rep(x * y, j).matrix()).cwiseAbs().maxCoeff());
      }
      const Eigen::MatrixXcd dz = schroedinger_rep(HeisenbergElement::central(params), j).matrix();
      const cplx zeta = std::polar(1.0, 2.0 * M_PI * j / k);
      central = std::max(central, (dz - zeta * Eigen::MatrixXcd::Identity(q, q)).cwiseAbs().maxCoeff());
    }
  }
  return {hom < 1e-12 && central < 1e-12, "homomorphism residual " + num(hom) + ", central residual " + num(central)};
}

Outcome gradient() {
  std::ostringstream s;
  bool ok = true;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (unsigned d : {2U, 8U}) {
    const PauliDisplacements ops(d);
    Eigen::VectorXcd v(d);
    for (unsigned i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
    v.normalize();
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
    ok = ok && worst < 1e-5;
    s << (d == 2 ? "" : ", ") << "d=" << d << " relative error " << num(worst);
  }
  return {ok, s.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double seconds;  // 0 means no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1.0,
       [] {
         return combine({exact_case_iii(2, HyperplaneType::Minus, 6, 3), exact_case_iii(2, HyperplaneType::Plus, 10, 5)});
       }},
      {2, 5.0,
       [] {
         return combine({exact_case_iii(3, HyperplaneType::Minus, 28, 7), exact_case_iii(3, HyperplaneType::Plus, 36, 9)});
       }},
      {3, 5.0,
       [] {
         return combine({numeric_case_iv(3, 1, Parity::Minus, 3, 0.5, 1e-9), numeric_case_iv(3, 1, Parity::Plus, 6, 0.25, 1e-9),
                         numeric_case_iv(5, 1, Parity::Minus, 10, 0.25, 1e-9),
                         numeric_case_iv(5, 1, Parity::Plus, 15, 1.0 / 6.0, 1e-9)});
       }},
      {4, 60.0,
       [] {
         return combine({numeric_case_iv(3, 2, Parity::Minus, 36, 0.125, 1e-8),
                         numeric_case_iv(3, 2, Parity::Plus, 45, 0.1, 1e-8)});
       }},
      {5, 1.0, [] { return searched(2, 1e-10, 1e-8); }},
      {6, 600.0, [] { return searched(8, 1e-8, 1e-7); }},
      {7, 10.0, census},
      {8, 0.0, two_transitive},
      {9, 0.0, multiplicity},
      {10, 0.0, commutant},
      {11, 0.0, representation},
      {12, 0.0, gradient},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = num(secs) + " s";
    if (c.seconds > 0) {
      timing += " / " + num(c.seconds) + " s";
      if (secs >= c.seconds) {
        o.ok = false;
        o.detail += "; over time";
      }
    }
    if (!o.ok) ++failed;
    std::printf("%s criterion %2d  [%s]  %s\n", o.ok ? "PASS" : "FAIL", c.id, timing.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
