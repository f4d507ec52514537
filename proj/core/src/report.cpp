#include "ddinv/report.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "ddinv/errors.hpp"
#include "ddinv/text_format.hpp"

namespace ddinv::experiment {
namespace {

using json = nlohmann::ordered_json;

json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json columns_to_json(const lti::Signal& s) {
  json out = json::array();
  for (Index k = 0; k < s.cols(); ++k) out.push_back(to_json(s.col(k)));
  return out;
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  writer(out);
  if (!out) throw InvalidInputError("error while writing '" + path + "'");
}

}  // namespace

void write_report(std::ostream& out, const RunReport& report) {
  const ReportMetadata& md = report.metadata;
  const auto& trace = report.trace;
  const auto& cert = report.certificate;

  json eig = json::array();
  for (const auto& z : cert.eigenvalues) eig.push_back({z.real(), z.imag()});

  json doc;
  doc["metadata"] = {
      {"system", md.system},
      {"n", md.n},
      {"m", md.m},
      {"p", md.p},
      {"N", md.past},
      {"L", md.delay},
      {"columns", md.columns},
      {"estimation_start_step", md.estimation_start_step},
      {"pe_order", md.pe_order},
      {"pe_rank", md.pe_rank},
      {"y_rank", md.y_rank},
      {"input_gain_norm", md.input_gain_norm},
      {"projector_form_gap", md.projector_form_gap},
      {"config", md.config_text},
  };
  doc["certificate"] = {
      {"spectral_radius", cert.spectral_radius},
      {"schur_stable", cert.schur_stable},
      {"eigenvalues", eig},
  };
  doc["estimates"] = columns_to_json(trace.estimates);
  if (report.truth) doc["true_inputs"] = columns_to_json(*report.truth);
  if (trace.error_norms) doc["error_norms"] = to_json(*trace.error_norms);
  doc["residual_norms"] = to_json(trace.residual_norms);
  doc["constraint_residuals"] = to_json(trace.constraint_residuals);
  out << doc.dump(2) << '\n';
}

void save_report(const RunReport& report, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_report(out, report); });
}

void write_plot_data(std::ostream& out, const RunReport& report) {
  const auto& trace = report.trace;
  const Index m = trace.estimates.rows();
  out << 'k';
  for (Index i = 1; i <= m; ++i) out << ",uhat_" << i;
  if (report.truth) {
    for (Index i = 1; i <= m; ++i) out << ",u_" << i;
  }
  if (trace.error_norms) out << ",error_norm";
  out << ",residual_norm,constraint_residual\n";

  for (Index j = 0; j < trace.steps(); ++j) {
    out << trace.start_step + j;
    for (Index i = 0; i < m; ++i) out << ',' << io::format_double(trace.estimates(i, j));
    if (report.truth) {
      for (Index i = 0; i < m; ++i) out << ',' << io::format_double((*report.truth)(i, j));
    }
    if (trace.error_norms) out << ',' << io::format_double((*trace.error_norms)(j));
    out << ',' << io::format_double(trace.residual_norms(j)) << ','
        << io::format_double(trace.constraint_residuals(j)) << '\n';
  }
}

void emit_plot_data(const RunReport& report, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_plot_data(out, report); });
}

}  // namespace ddinv::experiment
