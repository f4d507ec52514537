#include "ddinv/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include "ddinv/errors.hpp"
#include "ddinv/hankel.hpp"
#include "ddinv/linalg.hpp"
#include "ddinv/reference_systems.hpp"
#include "ddinv/trajectory_io.hpp"

namespace ddinv::experiment {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Independent generator per purpose so that, e.g., changing the horizon does
// not perturb the offline data.
enum class Stream : std::uint32_t { Offline = 0, Online = 1, Guess = 2 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

MatrixXd standard_normal(std::mt19937_64& rng, Index rows, Index cols,
                         double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = scale * dist(rng);
  }
  return out;
}

std::optional<lti::StateSpaceModel> reference_model(SystemChoice choice) {
  switch (choice) {
    case SystemChoice::StableZeros:
      return systems::make(systems::ReferenceSystem::StableZeros);
    case SystemChoice::NoZeros:
      return systems::make(systems::ReferenceSystem::NoZeros);
    case SystemChoice::UnstableZero:
      return systems::make(systems::ReferenceSystem::UnstableZero);
    case SystemChoice::FromFile:
      return std::nullopt;
  }
  return std::nullopt;
}

struct Resolved {
  std::optional<lti::StateSpaceModel> model;
  Index state_dim = 0;
  Index delay = 0;
};

Resolved resolve(const ScenarioConfig& config) {
  validate(config);
  Resolved r;
  r.model = reference_model(config.system);
  if (r.model) {
    r.state_dim = r.model->n();
    if (config.state_dim && *config.state_dim != r.state_dim) {
      throw ValidationError("n = " + std::to_string(*config.state_dim) +
                            " does not match the selected system (n = " +
                            std::to_string(r.state_dim) + ")");
    }
    const auto inherent = lti::inherent_delay(*r.model, std::nullopt,
                                              config.tolerances.rank_tol);
    if (!inherent) throw ValidationError("selected system is not invertible");
    r.delay = config.delay.value_or(*inherent);
    if (r.delay < *inherent) {
      throw ValidationError("L = " + std::to_string(r.delay) +
                            " is below the inherent delay " + std::to_string(*inherent));
    }
  } else {
    r.state_dim = *config.state_dim;
    r.delay = *config.delay;
  }
  if (config.past < r.state_dim) {
    throw ValidationError("N = " + std::to_string(config.past) +
                          " must be at least the state dimension n = " +
                          std::to_string(r.state_dim));
  }
  return r;
}

lti::Trajectory offline_for(const ScenarioConfig& config, const Resolved& r) {
  if (!r.model) return io::load_trajectory(config.offline_data);

  const lti::StateSpaceModel& model = *r.model;
  const Index columns = config.data_length - config.past - r.delay;
  const Index needed = 2 * (model.m() * (config.past + r.delay + 1) + model.n());
  if (columns < needed) {
    throw ValidationError("data_length = " + std::to_string(config.data_length) +
                          " gives T+1 = " + std::to_string(columns) +
                          " Hankel columns; at least " + std::to_string(needed) +
                          " are required (data_length >= " +
                          std::to_string(needed + config.past + r.delay) + ")");
  }
  auto rng = make_rng(config.seed, Stream::Offline);
  const MatrixXd inputs = standard_normal(rng, model.m(), config.data_length);
  return lti::simulate(model, VectorXd::Zero(model.n()), inputs);
}

PreparedData prepare_resolved(const ScenarioConfig& config, Resolved r) {
  PreparedData out;
  out.offline = offline_for(config, r);
  out.state_dim = r.state_dim;
  out.delay = r.delay;
  out.model = std::move(r.model);

  const Index m = out.offline.inputs.rows();
  if (out.model && (m != out.model->m() || out.offline.outputs.rows() != out.model->p())) {
    throw ValidationError("offline data dimensions do not match the model");
  }

  out.pe_order = out.state_dim + config.past + out.delay + 1;
  if (out.offline.length() < out.pe_order) {
    throw PersistencyError("offline data has " + std::to_string(out.offline.length()) +
                               " samples; persistency of excitation of order " +
                               std::to_string(out.pe_order) + " needs more",
                           m * out.pe_order, 0);
  }
  out.pe_rank = linalg::numerical_rank(
      hankel::block_hankel(out.offline.inputs, out.pe_order), config.tolerances.rank_tol);
  if (out.pe_rank != m * out.pe_order) {
    throw PersistencyError("offline input is not persistently exciting of order " +
                               std::to_string(out.pe_order) + ": Hankel rank " +
                               std::to_string(out.pe_rank) + ", required " +
                               std::to_string(m * out.pe_order),
                           m * out.pe_order, out.pe_rank);
  }

  out.gains = estimator::build_gains(
      hankel::partition_data(out.offline.inputs, out.offline.outputs, config.past,
                             out.delay),
      config.tolerances);
  return out;
}

}  // namespace

PreparedData prepare(const ScenarioConfig& config) {
  return prepare_resolved(config, resolve(config));
}

lti::Trajectory generate_offline_data(const ScenarioConfig& config) {
  return offline_for(config, resolve(config));
}

lti::Trajectory online_trajectory(const ScenarioConfig& config,
                                  const PreparedData& prepared) {
  if (!prepared.model) {
    if (config.online_data.empty()) {
      throw ValidationError("system = from-file requires online_data for estimation");
    }
    lti::Trajectory traj = io::load_trajectory(config.online_data);
    if (traj.inputs.rows() != prepared.gains.m() ||
        traj.outputs.rows() != prepared.gains.p()) {
      throw ValidationError("online data dimensions do not match the offline data");
    }
    return traj;
  }
  const lti::StateSpaceModel& model = *prepared.model;
  auto rng = make_rng(config.seed, Stream::Online);
  const VectorXd x0 = standard_normal(rng, model.n(), 1);
  const MatrixXd inputs =
      standard_normal(rng, model.m(), config.horizon + config.past + prepared.delay);
  return lti::simulate(model, x0, inputs);
}

VectorXd initial_guess(const ScenarioConfig& config, Index m) {
  if (config.init.kind == InitialGuess::Kind::Zero) {
    return VectorXd::Zero(m * config.past);
  }
  auto rng = make_rng(config.seed, Stream::Guess);
  return standard_normal(rng, m * config.past, 1, config.init.scale);
}

RunReport run_scenario(const ScenarioConfig& config) {
  const PreparedData prepared = prepare(config);
  const lti::Trajectory online = online_trajectory(config, prepared);
  const auto& gains = prepared.gains;

  RunReport report;
  report.trace = estimator::run(gains, initial_guess(config, gains.m()), online.outputs,
                                online.inputs);
  report.truth = online.inputs.middleCols(report.trace.start_step, report.trace.steps());
  report.certificate = estimator::convergence_certificate(gains);

  ScenarioConfig echo = config;
  echo.delay = prepared.delay;
  echo.state_dim = prepared.state_dim;
  ReportMetadata& md = report.metadata;
  md.config_text = to_text(echo);
  md.system = std::string(to_string(config.system));
  md.n = prepared.state_dim;
  md.m = gains.m();
  md.p = gains.p();
  md.past = gains.past();
  md.delay = gains.delay();
  md.columns = gains.data->columns();
  md.estimation_start_step = report.trace.start_step;
  md.pe_order = prepared.pe_order;
  md.pe_rank = prepared.pe_rank;
  md.y_rank = gains.y_rank;
  md.input_gain_norm = linalg::norm2(gains.input_gain);
  md.projector_form_gap = gains.projector_form_gap;
  return report;
}

std::vector<RunReport> run_batch(const ScenarioConfig& config, int count, int threads) {
  if (count < 1) throw ValidationError("batch size must be >= 1");
  std::vector<RunReport> reports(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(reports.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        ScenarioConfig local = config;
        local.seed = config.seed + static_cast<std::uint64_t>(i);
        reports[static_cast<std::size_t>(i)] = run_scenario(local);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = std::clamp(threads, 1, count);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

OracleResult run_oracle(const ScenarioConfig& config) {
  Resolved r = resolve(config);
  if (!r.model) {
    throw ValidationError("the model-based oracle needs a known model (not from-file)");
  }
  const lti::StateSpaceModel& model = *r.model;
  const double tol = config.tolerances.rank_tol;

  OracleResult out;
  std::optional<Eigen::MatrixXd> gain;
  for (Index delay = r.delay; delay <= std::max(r.delay, model.n()) && !gain; ++delay) {
    try {
      gain = lti::state_free_inverse_gain(model, delay, tol);
      out.delay = delay;
      out.state_free = true;
    } catch (const NoLeftInverseError&) {
    }
  }
  if (!gain) {
    gain = lti::left_inverse_gain(model, r.delay, tol);
    out.delay = r.delay;
  }
  const lti::InverseSystem inv = lti::inverse_system(model, *gain, out.delay);

  PreparedData shell;
  shell.model = model;
  shell.delay = r.delay;
  const lti::Trajectory online = online_trajectory(config, shell);
  out.estimates = lti::model_based_reconstruct(inv, VectorXd::Zero(model.n()), online.outputs);
  out.truth = online.inputs.leftCols(out.estimates.cols());
  out.error_norms = (out.estimates - out.truth).colwise().norm().transpose();
  return out;
}

}  // namespace ddinv::experiment
