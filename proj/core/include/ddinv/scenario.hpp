#pragma once

#include <optional>
#include <vector>

#include "ddinv/config.hpp"
#include "ddinv/estimator.hpp"
#include "ddinv/lti.hpp"
#include "ddinv/report.hpp"

namespace ddinv::experiment {

/// Offline data, the gains built from it, and the generating model when one is
/// known (reference systems).
struct PreparedData {
  std::optional<lti::StateSpaceModel> model;
  lti::Trajectory offline;
  Index state_dim = 0;
  Index delay = 0;
  Index pe_order = 0;
  Index pe_rank = 0;
  estimator::EstimatorGains gains;
};

/// Generates (or loads) offline data, verifies persistency of excitation of
/// order n + N + L + 1, and builds the estimator gains. Throws
/// PersistencyError with the achieved rank when the excitation check fails
/// and ValidationError for inconsistent configs (e.g. N < n).
PreparedData prepare(const ScenarioConfig& config);

/// Offline trajectory only (what `gen-data` writes).
lti::Trajectory generate_offline_data(const ScenarioConfig& config);

/// Fresh online trajectory of horizon + N + L samples from a random initial
/// state, or the online_data file for from-file scenarios.
lti::Trajectory online_trajectory(const ScenarioConfig& config,
                                  const PreparedData& prepared);

/// Initial guess of u_{0:N-1} per config.init.
Eigen::VectorXd initial_guess(const ScenarioConfig& config, Index m);

/// Full experiment: prepare, simulate online data, run the estimator.
RunReport run_scenario(const ScenarioConfig& config);

/// Runs `count` independent copies with seeds seed, seed+1, ... on up to
/// `threads` worker threads. Results are ordered by scenario index.
std::vector<RunReport> run_batch(const ScenarioConfig& config, int count, int threads);

/// Model-based reconstruction of the online trajectory with the inverse system
/// initialised at x0_hat = 0. Uses a state-free gain (P O_L = 0) when the model
/// admits one, otherwise the minimum-norm left inverse at the scenario delay.
struct OracleResult {
  lti::Signal estimates;  ///< column k estimates u_k
  lti::Signal truth;
  Eigen::VectorXd error_norms;
  Index delay = 0;
  bool state_free = false;
};
OracleResult run_oracle(const ScenarioConfig& config);

}  // namespace ddinv::experiment
