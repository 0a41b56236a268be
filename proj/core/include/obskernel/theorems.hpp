#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obskernel/perturb.hpp"

namespace obskernel {

/// Outcome of one theorem over every generated environment.
struct TheoremTally {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::optional<TheoremCheck> firstFailure;
};

struct SuiteReport {
  std::size_t environments = 0;
  std::uint64_t seed = 0;
  std::vector<TheoremTally> theorems;

  bool ok() const;
};

/// Checks the error-calculus identities in `environments` random sessions. Each
/// environment draws fresh symbols, Cst/Uns memberships, operands and an
/// amplitude (symbolic, 0, 1 or a rational in between) from `seed`.
SuiteReport runTheoremSuite(std::size_t environments, std::uint64_t seed);

}  // namespace obskernel
