#ifndef SCHOTTKY_ERRORS_HPP
#define SCHOTTKY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace schottky {

enum class ErrorCode {
  invalid_argument,
  singular_factor,
  non_convergent,
  overflow,
  cost_cap_exceeded,
  not_on_locus,
  on_hyperelliptic_locus,
  gradient_degenerate,
  left_siegel_space,
  max_iter,
  not_found,
  zero_matrix,
  singular_input,
  quadrature_not_converged,
  not_symmetric,
  not_positive_definite,
  ambiguous_split,
};

inline const char* to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::singular_factor: return "SingularFactor";
    case ErrorCode::non_convergent: return "NonConvergent";
    case ErrorCode::overflow: return "Overflow";
    case ErrorCode::cost_cap_exceeded: return "CostCapExceeded";
    case ErrorCode::not_on_locus: return "NotOnLocus";
    case ErrorCode::on_hyperelliptic_locus: return "OnHyperellipticLocus";
    case ErrorCode::gradient_degenerate: return "GradientDegenerate";
    case ErrorCode::left_siegel_space: return "LeftSiegelSpace";
    case ErrorCode::max_iter: return "MaxIter";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::zero_matrix: return "ZeroMatrix";
    case ErrorCode::singular_input: return "SingularInput";
    case ErrorCode::quadrature_not_converged: return "QuadratureNotConverged";
    case ErrorCode::not_symmetric: return "NotSymmetric";
    case ErrorCode::not_positive_definite: return "NotPositiveDefinite";
    case ErrorCode::ambiguous_split: return "AmbiguousSplit";
  }
  return "Unknown";
}

// All numerical failures raised by the library carry a code so callers
// (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error
{
 public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code)
  {}

  ErrorCode code() const noexcept { return m_code; }

 private:
  ErrorCode m_code;
};

}  // namespace schottky

#endif
