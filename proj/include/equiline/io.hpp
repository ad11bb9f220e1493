#pragma once

// Lineset JSON files, certification reports and the family table.
//
// File layout:
//   { "case", "n", "d", "params", "vectors": [[[re, im], ...] per column],
//     "meta", "manifest" }
// Floats in "vectors" are printed with 17 significant digits, so parsing
// restores every double exactly.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equiline/action.hpp"
#include "equiline/errors.hpp"
#include "equiline/lineset.hpp"

namespace equiline {

inline constexpr const char* tool_version = "equiline 0.1.0";

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::json meta_to_json(const ConstructionMeta& meta) {
  return {{"case", meta.case_tag}, {"p", meta.p}, {"m", meta.m}, {"choice", meta.choice}, {"seed", meta.seed}};
}

inline ConstructionMeta meta_from_json(const nlohmann::json& j) {
  ConstructionMeta meta;
  meta.case_tag = j.at("case").get<std::string>();
  meta.p = j.value("p", 0U);
  meta.m = j.value("m", 0U);
  meta.choice = j.value("choice", std::string{});
  meta.seed = j.value("seed", std::uint64_t{0});
  return meta;
}

/// Reproduction record; deliberately free of wall-clock time so identical
/// inputs give byte-identical files.
struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  double construction_tol = LineSet::norm_tolerance;
  double certification_tol = 1e-8;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"parameters", parameters},
            {"seed", seed},
            {"tool", tool_version},
            {"tolerances", {{"construction", construction_tol}, {"certification", certification_tol}}}};
  }
};

inline std::string serialize_lineset(const LineSet& l, const nlohmann::json& params = nlohmann::json::object(),
                                     const std::optional<RunManifest>& manifest = {}) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"case\": " << nlohmann::json(l.meta() ? l.meta()->case_tag : std::string{}).dump() << ",\n";
  out << "  \"n\": " << l.n() << ",\n";
  out << "  \"d\": " << l.d() << ",\n";
  out << "  \"params\": " << params.dump() << ",\n";
  out << "  \"vectors\": [\n";
  for (Eigen::Index c = 0; c < l.n(); ++c) {
    out << "    [";
    for (Eigen::Index r = 0; r < l.d(); ++r) {
      const cplx z = l.vectors()(r, c);
      out << (r ? ", " : "") << '[' << format_double(z.real()) << ", " << format_double(z.imag()) << ']';
    }
    out << (c + 1 < l.n() ? "],\n" : "]\n");
  }
  out << "  ],\n";
  out << "  \"meta\": " << (l.meta() ? meta_to_json(*l.meta()).dump() : "null");
  if (manifest) out << ",\n  \"manifest\": " << manifest->to_json().dump();
  out << "\n}\n";
  return out.str();
}

struct LineSetFile {
  LineSet lines;
  nlohmann::json params;
};

inline LineSetFile parse_lineset(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::bad_input, std::string("not valid JSON: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<Eigen::Index>();
    const auto d = j.at("d").get<Eigen::Index>();
    const auto& cols = j.at("vectors");
    if (!cols.is_array() || static_cast<Eigen::Index>(cols.size()) != n)
      throw error(errc::bad_input, "\"vectors\" must hold n columns");
    Eigen::MatrixXcd v(d, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& col = cols[static_cast<std::size_t>(c)];
      if (!col.is_array() || static_cast<Eigen::Index>(col.size()) != d)
        throw error(errc::bad_input, "column " + std::to_string(c) + " must hold d entries");
      for (Eigen::Index r = 0; r < d; ++r) {
        const auto& z = col[static_cast<std::size_t>(r)];
        v(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
      }
    }
    std::optional<ConstructionMeta> meta;
    if (j.contains("meta") && j["meta"].is_object()) meta = meta_from_json(j["meta"]);
    LineSet lines(std::move(v), meta);
    if (meta && meta->case_tag == "iii") lines.recover_signs();
    return {std::move(lines), j.value("params", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::bad_input, std::string("malformed lineset file: ") + e.what());
  }
}

/// Header i,j,re,im followed by n^2 rows.
inline std::string gram_csv(const GramMatrix& gm) {
  std::ostringstream out;
  out << "i,j,re,im\n";
  for (Eigen::Index i = 0; i < gm.n(); ++i)
    for (Eigen::Index j = 0; j < gm.n(); ++j)
      out << i << ',' << j << ',' << format_double(gm.g(i, j).real()) << ',' << format_double(gm.g(i, j).imag()) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Certification report

struct CertifyReport {
  Eigen::Index n = 0, d = 0, rank = 0;
  std::optional<AngleCertificate> angle;
  double frame_residual = 0.0;
  double welch_residual = 0.0;
  bool tight = false;
  std::size_t commutant_dim = 0;
  std::optional<std::string> failure;  // first failing certificate
  std::string failure_detail;

  bool pass() const { return !failure; }

  nlohmann::json to_json() const {
    nlohmann::json j{{"n", n},
                     {"d", d},
                     {"rank", rank},
                     {"frame_residual", frame_residual},
                     {"welch_residual", welch_residual},
                     {"tight", tight},
                     {"commutant_dim", commutant_dim},
                     {"pass", pass()}};
    if (angle) {
      j["alpha"] = angle->alpha;
      j["alpha_squared"] = angle->alpha * angle->alpha;
      j["max_dev"] = angle->max_dev;
      j["exact"] = angle->exact;
      if (angle->exact) j["alpha_fraction"] = {angle->numerator, angle->denominator};
    }
    j["failure"] = failure ? nlohmann::json(*failure) : nlohmann::json(nullptr);
    return j;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "lines n = " << n << ", dimension d = " << d << ", rank = " << rank << '\n';
    if (angle) {
      out << "alpha = " << format_double(angle->alpha);
      if (angle->exact) out << " = " << angle->numerator << '/' << angle->denominator << " (exact)";
      out << ", max_dev = " << format_double(angle->max_dev) << '\n';
    }
    out << "frame residual = " << format_double(frame_residual) << ", Welch residual = " << format_double(welch_residual)
        << '\n';
    out << "commutant dimension = " << commutant_dim << '\n';
    if (failure)
      out << "FAIL " << *failure << (failure_detail.empty() ? "" : ": " + failure_detail) << '\n';
    else
      out << "PASS\n";
    return out.str();
  }
};

/// Span, equiangularity, tightness and trivial commutant, stopping the
/// verdict at the first failure (later numbers are still filled in).
inline CertifyReport certify_lineset(const LineSet& l, double tol = 1e-8) {
  CertifyReport rep;
  rep.n = l.n();
  rep.d = l.d();
  auto fail = [&](const std::string& name, const std::string& detail) {
    if (!rep.failure) {
      rep.failure = name;
      rep.failure_detail = detail;
    }
  };

  rep.rank = numerical_rank(l.vectors());
  if (rep.rank != l.d()) fail("SpanDeficient", "rank " + std::to_string(rep.rank));

  const GramMatrix gm = gram(l);
  try {
    rep.angle = certify_equiangular(gm, tol);
    rep.welch_residual = rep.angle->exact && welch_exact(*rep.angle, l.n(), l.d())
                             ? 0.0
                             : welch_residual(rep.angle->alpha, l.n(), l.d());
  } catch (const not_equiangular& e) {
    fail("NotEquiangular", e.what());
  }
  rep.frame_residual = frame_residual(gm, l.d());
  rep.tight = certify_tight(gm, l.d(), tol);
  if (!rep.tight) fail("NotTight", "frame residual " + format_double(rep.frame_residual));
  rep.commutant_dim = projector_commutant_dimension(l);
  if (rep.commutant_dim != 1) fail("NontrivialCommutant", "dimension " + std::to_string(rep.commutant_dim));
  return rep;
}

inline nlohmann::json action_to_json(const ActionCertificate& cert) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : cert.generators) gens.push_back(g.images());
  return {{"generators", gens},
          {"transitive", cert.transitive},
          {"two_transitive", cert.two_transitive},
          {"group_order", cert.group_order},
          {"matched_unitaries", cert.matched_unitaries}};
}

// ---------------------------------------------------------------------------
// Family table

struct TableRow {
  TheoremCase entry;
  std::vector<std::string> commands;  // empty beyond desk scale
};

inline std::vector<TableRow> family_table(std::uint64_t max_n = 4096, std::uint64_t desk_n = 81) {
  std::vector<TableRow> rows;
  for (std::uint64_t n = 4; n <= max_n; ++n)
    for (const auto& c : theorem_cases(n)) {
      TableRow row{c, {}};
      if (n <= desk_n) {
        if (c.tag == "i") row.commands.push_back("equiline construct --case i --seed 1");
        if (c.tag == "ii") row.commands.push_back("equiline construct --case ii --seed 1");
        if (c.tag == "iii")
          for (const char* t : {"minus", "plus"})
            row.commands.push_back("equiline construct --case iii --m " + std::to_string(c.m) + " --type " + t);
        if (c.tag == "iv")
          for (const char* t : {"minus", "plus"})
            row.commands.push_back("equiline construct --case iv --p " + std::to_string(c.p) + " --m " +
                                   std::to_string(c.m) + " --eigen " + t);
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

inline std::string family_table_text(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-5s %5s %5s %6s %6s  %s\n", "case", "p", "m", "n", "d", "d'");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-5s %5u %5u %6llu %6llu  %llu\n", r.entry.tag.c_str(), r.entry.p, r.entry.m,
                  static_cast<unsigned long long>(r.entry.n), static_cast<unsigned long long>(r.entry.d_small),
                  static_cast<unsigned long long>(r.entry.d_large));
    out << line;
    for (const auto& c : r.commands) out << "      " << c << '\n';
  }
  return out.str();
}

}  // namespace equiline
