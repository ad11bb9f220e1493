#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace equiline {

enum class errc {
  radical_dimension,
  singular_radical,
  classifier_mismatch,
  parameter_mismatch,
  index_out_of_range,
  not_unitary,
  not_normalizing,
  not_symplectic,
  span_deficient,
  malformed_lineset,
  not_equiangular,
  not_converged,
  unknown_case,
  not_a_symmetry,
  not_a_projector,
  group_too_large,
  bad_input,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::radical_dimension: return "RadicalDimension";
    case errc::singular_radical: return "SingularRadical";
    case errc::classifier_mismatch: return "ClassifierMismatch";
    case errc::parameter_mismatch: return "ParameterMismatch";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::not_unitary: return "NotUnitary";
    case errc::not_normalizing: return "NotNormalizing";
    case errc::not_symplectic: return "NotSymplectic";
    case errc::span_deficient: return "SpanDeficient";
    case errc::malformed_lineset: return "MalformedLineSet";
    case errc::not_equiangular: return "NotEquiangular";
    case errc::not_converged: return "NotConverged";
    case errc::unknown_case: return "UnknownCase";
    case errc::not_a_symmetry: return "NotASymmetry";
    case errc::not_a_projector: return "NotAProjector";
    case errc::group_too_large: return "GroupTooLarge";
    case errc::bad_input: return "BadInput";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

/// Raised by certify_equiangular; carries the worst offending pair.
class not_equiangular : public error {
 public:
  not_equiangular(std::size_t i, std::size_t j, double deviation)
      : error(errc::not_equiangular, "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                         ") deviates by " + std::to_string(deviation)),
        i_(i), j_(j), deviation_(deviation) {}

  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::size_t i_, j_;
  double deviation_;
};

/// Raised by search_fiducial when no restart reaches the target.
class not_converged : public error {
 public:
  explicit not_converged(double best_excess)
      : error(errc::not_converged,
              "best frame potential excess " + std::to_string(best_excess)),
        best_excess_(best_excess) {}

  double best_excess() const noexcept { return best_excess_; }

 private:
  double best_excess_;
};

}  // namespace equiline
