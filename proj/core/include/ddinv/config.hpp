#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "ddinv/linalg.hpp"

namespace ddinv::experiment {

using Eigen::Index;

enum class SystemChoice { StableZeros, NoZeros, UnstableZero, FromFile };

struct InitialGuess {
  enum class Kind { Zero, SeededRandom };
  Kind kind = Kind::Zero;
  double scale = 1.0;  ///< standard deviation of SeededRandom guesses
};

/// Everything needed to reproduce one experiment. Defaults follow the
/// reference setup: N = 10, delay resolved from the model, 500 offline
/// samples.
struct ScenarioConfig {
  SystemChoice system = SystemChoice::StableZeros;
  Index past = 10;                  ///< N
  std::optional<Index> delay;       ///< L; empty means "auto" (inherent delay)
  Index data_length = 500;          ///< offline samples, T + N + L + 1
  std::uint64_t seed = 1;
  linalg::ToleranceSet tolerances;
  Index horizon = 300;              ///< number of online estimates
  InitialGuess init;
  double zero_margin = 1e-9;
  std::optional<Index> state_dim;   ///< n; required for from-file data
  std::string offline_data;         ///< CSV path, from-file only
  std::string online_data;          ///< CSV path, from-file only
};

/// Parses `key = value` lines; '#' starts a comment line. Unknown keys and
/// malformed values raise ParseError with the offending line number.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Applies one setting using the same keys and syntax as the config file.
void apply_setting(ScenarioConfig& config, std::string_view key,
                   std::string_view value);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& config);

/// Throws ValidationError on values no scenario can run with.
void validate(const ScenarioConfig& config);

std::string_view to_string(SystemChoice choice);
SystemChoice parse_system(std::string_view name);

}  // namespace ddinv::experiment
