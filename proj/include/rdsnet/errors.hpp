#ifndef RDSNET_ERRORS_HPP
#define RDSNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdsnet {

// Exit-code taxonomy used by the CLI: usage -> 1, infeasible -> 2, data -> 3.

// Bad arguments or preconditions (out-of-range ids, invalid flag values).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter set that cannot be realized as a network.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Infeasible alpha carries the smallest alpha that would work.
struct InfeasibleAlphaError : InfeasibleError {
  InfeasibleAlphaError(const std::string& msg, double min_alpha)
      : InfeasibleError(msg), min_feasible_alpha(min_alpha) {}
  double min_feasible_alpha;
};

// Malformed or unreadable input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity that is undefined on the given input (empty status group,
// zero-mass block, zero inclusion weight). Callers decide the fallback.
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rdsnet

#endif  // RDSNET_ERRORS_HPP
