#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "obskernel/session.hpp"

namespace obskernel::cli {

enum class Format { Text, Csv };

/// Parsed `key = value` experiment description. `#` starts a comment line.
///
///   setup                  statements run first (rules, `!` assertions), `;` separated
///   tag, system, inputs    the material system: tag, realization and input count
///   property, outputs      M and its number of outputs
///   at                     comma separated input sample when inputs > 0
///   interpretation         P applied to the output
///   gamma, phi             a gauge to check against M
///   program                `montecarlo`; program.source is a pure function of a
///                          uniform draw, with program.target, program.min_samples,
///                          program.max_steps
///   series.response        pure function of eps; series.samples, series.order
///   noise.function         pure function; noise.x, noise.amplitude, noise.samples
///   seed, budget, tol      overrides
struct ExperimentConfig {
  std::map<std::string, std::string> values;

  static ExperimentConfig parse(const std::string& text);
  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
};

/// Command-line overrides; they win over the config's own seed, budget and tol.
struct RunOptions {
  std::optional<std::size_t> budget;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  Format format = Format::Text;
};

/// Runs every section the config names and writes the report to `out`.
void runExperimentConfig(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

}  // namespace obskernel::cli
