#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ddinv/config.hpp"
#include "ddinv/estimator.hpp"

namespace ddinv::experiment {

/// Scenario facts that are not part of the estimation trace. Contains no
/// wall-clock data, so identical configs serialize to identical bytes.
struct ReportMetadata {
  std::string config_text;  ///< canonical echo of the resolved config
  std::string system;
  Index n = 0, m = 0, p = 0;
  Index past = 0, delay = 0;
  Index columns = 0;                ///< T + 1
  Index estimation_start_step = 0;  ///< time index of the first estimate
  Index pe_order = 0;               ///< n + N + L + 1
  Index pe_rank = 0;                ///< achieved rank of the PE Hankel matrix
  Index y_rank = 0;
  double input_gain_norm = 0.0;     ///< |M_u|_2
  double projector_form_gap = 0.0;
};

struct RunReport {
  estimator::EstimationTrace trace;
  std::optional<lti::Signal> truth;  ///< true inputs aligned with trace.estimates
  estimator::ConvergenceCertificate certificate;
  ReportMetadata metadata;
};

/// JSON report with round-trip precision numbers.
void write_report(std::ostream& out, const RunReport& report);
void save_report(const RunReport& report, const std::string& path);

/// Per-step CSV: k, uhat_*, u_* (if known), error_norm (if known),
/// residual_norm, constraint_residual.
void write_plot_data(std::ostream& out, const RunReport& report);
void emit_plot_data(const RunReport& report, const std::string& path);

}  // namespace ddinv::experiment
