#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace proxipoint {

/// Failure taxonomy for the whole library. The CLI maps these onto exit
/// codes: mathematical/hypothesis failures -> 2, certifier violations -> 3,
/// usage and schema problems -> 4.
enum class errc {
  // geometry
  dimension_mismatch,
  empty_after_truncation,
  // expression DSL
  syntax_error,
  arity_error,
  unknown_variable,
  guard_miss,
  numeric_error,
  // implicit relations
  eval_error,
  unknown_name,
  param_out_of_range,
  // proximal engine
  empty_proximal_set,
  no_feasible_point,
  // solvers
  start_not_proximal,
  diverging,
  max_iter_exceeded,
  subsequence_not_found,
  sequence_missing,
  dist_zero,
  too_short,
  rate_geq_one,
  residual_too_large,
  // harness
  unknown_example,
  schema_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::empty_after_truncation: return "EmptyAfterTruncation";
    case errc::syntax_error: return "SyntaxError";
    case errc::arity_error: return "ArityError";
    case errc::unknown_variable: return "UnknownVariable";
    case errc::guard_miss: return "GuardMiss";
    case errc::numeric_error: return "NumericError";
    case errc::eval_error: return "EvalError";
    case errc::unknown_name: return "UnknownName";
    case errc::param_out_of_range: return "ParamOutOfRange";
    case errc::empty_proximal_set: return "EmptyProximalSet";
    case errc::no_feasible_point: return "NoFeasiblePoint";
    case errc::start_not_proximal: return "StartNotProximal";
    case errc::diverging: return "Diverging";
    case errc::max_iter_exceeded: return "MaxIterExceeded";
    case errc::subsequence_not_found: return "SubsequenceNotFound";
    case errc::sequence_missing: return "SequenceMissing";
    case errc::dist_zero: return "DistZero";
    case errc::too_short: return "TooShort";
    case errc::rate_geq_one: return "RateGeqOne";
    case errc::residual_too_large: return "ResidualTooLarge";
    case errc::unknown_example: return "UnknownExample";
    case errc::schema_error: return "SchemaError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace proxipoint
