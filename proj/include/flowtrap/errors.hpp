#pragma once

#include <stdexcept>
#include <string>

namespace flowtrap {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller handed us input that breaks a documented precondition.
struct contract_violation : error {
  using error::error;
};

// An internal guarantee failed mid-run; indicates a bug here or an oracle
// that lies about its smoothness constants.
struct invariant_violation : error {
  using error::error;
};

struct parse_error : error {
  using error::error;
};

// A configured step/query budget ran out where the math says it should not.
struct budget_error : error {
  using error::error;
};

}  // namespace flowtrap
