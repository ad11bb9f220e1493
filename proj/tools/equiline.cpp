// equiline: construct, certify and inspect 2-transitive equiangular line sets.
//
// Exit codes: 0 success, 2 invalid parameters or unreadable input,
// 3 fiducial search did not converge, 4 a certificate failed,
// 5 symmetries could not be derived (no metadata, or not a symmetry).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "equiline/equiline.hpp"

namespace {

using namespace equiline;

enum exit_code : int { ok = 0, invalid = 2, no_convergence = 3, cert_failed = 4, no_symmetry = 5 };

struct Options {
  std::string case_tag;
  unsigned m = 0;
  unsigned p = 0;
  std::string type = "minus";
  std::string eigen = "minus";
  std::uint64_t seed = 1;
  unsigned restarts = 0;
  double tol = 1e-8;
  std::string in;
  std::string out;
  std::string gram_csv;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error(errc::bad_input, "cannot write '" + path + "'");
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error(errc::bad_input, "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

template <class E>
E parse_choice(const std::string& s, const char* flag) {
  if (s == "plus") return E::Plus;
  if (s == "minus") return E::Minus;
  throw error(errc::parameter_mismatch, std::string(flag) + " must be 'plus' or 'minus'");
}

int construct(const Options& o) {
  nlohmann::json params;
  std::optional<LineSet> lines;
  if (o.case_tag == "iii") {
    if (o.m < 2 || o.m > 6) throw error(errc::parameter_mismatch, "case iii needs 2 <= --m <= 6 (n <= 4096)");
    lines = construct_case_iii(o.m, parse_choice<HyperplaneType>(o.type, "--type"));
    params = {{"m", o.m}, {"type", o.type}};
  } else if (o.case_tag == "iv") {
    if (o.p < 3 || o.p % 2 == 0 || !is_prime(o.p) || o.m < 1)
      throw error(errc::parameter_mismatch, "case iv needs an odd prime --p and --m >= 1");
    if (ipow(o.p, 2 * o.m) > 4096) throw error(errc::parameter_mismatch, "case iv is limited to p^(2m) <= 4096");
    lines = construct_case_iv(o.p, o.m, parse_choice<Parity>(o.eigen, "--eigen"));
    params = {{"p", o.p}, {"m", o.m}, {"eigen", o.eigen}};
  } else if (o.case_tag == "i" || o.case_tag == "ii") {
    const unsigned d = o.case_tag == "i" ? 2 : 8;
    SearchConfig cfg = SearchConfig::defaults_for(d);
    cfg.seed = o.seed;
    if (o.restarts) cfg.restarts = o.restarts;
    const SearchReport rep = search_fiducial(cfg);
    std::cerr << "frame potential " << format_double(rep.potential) << " (excess " << format_double(rep.excess)
              << ") from restart " << rep.best_restart << ", " << rep.converged_restarts << "/" << cfg.restarts
              << " restarts converged\n";
    lines = orbit_lineset(rep.fiducial, d, o.seed);
    params = {{"seed", o.seed}, {"restarts", cfg.restarts}, {"max_iters", cfg.max_iters}};
  } else {
    throw error(errc::parameter_mismatch, "--case must be one of i, ii, iii, iv");
  }

  RunManifest manifest;
  manifest.command = "construct";
  manifest.parameters = params;
  manifest.seed = o.case_tag == "i" || o.case_tag == "ii" ? o.seed : 0;
  manifest.certification_tol = o.tol;
  write_text(o.out, serialize_lineset(*lines, params, manifest));
  if (!o.gram_csv.empty()) write_text(o.gram_csv, gram_csv(gram(*lines)));
  return ok;
}

int certify(const Options& o) {
  const LineSetFile file = parse_lineset(read_text(o.in));
  const CertifyReport rep = certify_lineset(file.lines, o.tol);
  std::cout << rep.to_text();
  if (!o.out.empty()) write_text(o.out, rep.to_json().dump(2) + "\n");
  if (!o.gram_csv.empty()) write_text(o.gram_csv, gram_csv(gram(file.lines)));
  return rep.pass() ? ok : cert_failed;
}

int action(const Options& o) {
  const LineSetFile file = parse_lineset(read_text(o.in));
  ActionCertificate cert;
  try {
    cert = certify_action(file.lines, o.tol);
  } catch (const error& e) {
    if (e.code() == errc::bad_input || e.code() == errc::not_a_symmetry || e.code() == errc::unknown_case) {
      std::cerr << "equiline: " << e.what() << '\n';
      return no_symmetry;
    }
    throw;
  }
  const std::string text = action_to_json(cert).dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) write_text(o.out, text);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and certify 2-transitive sets of equiangular lines"};
  app.require_subcommand(1);
  Options o;

  auto* c = app.add_subcommand("construct", "Build a line set and write it as JSON");
  c->add_option("--case", o.case_tag, "Family: i, ii, iii or iv")->required();
  c->add_option("--m", o.m, "Rank parameter m");
  c->add_option("--p", o.p, "Odd prime p (case iv)");
  c->add_option("--type", o.type, "Hyperplane type for case iii: minus or plus")->capture_default_str();
  c->add_option("--eigen", o.eigen, "Parity eigenspace for case iv: minus or plus")->capture_default_str();
  c->add_option("--seed", o.seed, "Search seed for cases i and ii")->capture_default_str();
  c->add_option("--restarts", o.restarts, "Search restarts (default 8 for d=2, 64 for d=8)");
  c->add_option("--tol", o.tol, "Certification tolerance recorded in the manifest")->capture_default_str();
  c->add_option("--out", o.out, "Output file (default stdout)");
  c->add_option("--gram-csv", o.gram_csv, "Also write the Gram matrix as i,j,re,im rows");

  auto* v = app.add_subcommand("certify", "Check span, equiangularity, tightness and the trivial commutant");
  v->add_option("input", o.in, "Line set JSON file")->required();
  v->add_option("--tol", o.tol, "Tolerance for numeric certificates")->capture_default_str();
  v->add_option("--out", o.out, "Write the JSON report here");
  v->add_option("--gram-csv", o.gram_csv, "Write the Gram matrix as i,j,re,im rows");

  auto* a = app.add_subcommand("action", "Permutation action of the construction's symmetries");
  a->add_option("input", o.in, "Line set JSON file written by construct")->required();
  a->add_option("--tol", o.tol, "Line matching tolerance")->capture_default_str();
  a->add_option("--out", o.out, "Also write the JSON certificate here");

  auto* t = app.add_subcommand("table", "List the family up to n = 4096");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid;
  }

  try {
    if (*c) return construct(o);
    if (*v) return certify(o);
    if (*a) return action(o);
    if (*t) {
      std::cout << family_table_text(family_table());
      return ok;
    }
  } catch (const not_converged& e) {
    std::cerr << "equiline: " << e.what() << '\n';
    return no_convergence;
  } catch (const error& e) {
    std::cerr << "equiline: " << e.what() << '\n';
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "equiline: " << e.what() << '\n';
    return invalid;
  }
  return invalid;
}
