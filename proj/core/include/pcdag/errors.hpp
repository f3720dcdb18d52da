#ifndef PCDAG_ERRORS_HPP
#define PCDAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcdag {

// Violated precondition or type invariant (caller bug).
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Conditioning submatrix is numerically singular; the skeleton loop maps
// this to "independence retained" and counts the event.
struct SingularConditioningError : std::runtime_error {
  explicit SingularConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

// A partially directed graph that does not describe an equivalence class
// of DAGs (no consistent extension found within the retry budget).
struct InvalidCpdagError : std::runtime_error {
  explicit InvalidCpdagError(const std::string& msg) : std::runtime_error(msg) {}
};

// Robust scale of a sample with zero spread.
struct DegenerateScaleError : std::runtime_error {
  explicit DegenerateScaleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Loss of positive definiteness or other numerical failure.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (CSV/JSON).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Every fit in a tuning grid failed.
struct TuningError : std::runtime_error {
  explicit TuningError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pcdag

#endif
