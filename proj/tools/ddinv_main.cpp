// ddinv: data-driven unknown-input reconstruction experiments.
//
//   ddinv run            full experiment, JSON report (+ optional plot CSV)
//   ddinv certify        convergence certificate only; exit 0 iff Schur stable
//   ddinv gen-data       offline (or online) trajectory to CSV
//   ddinv invert-oracle  model-based inverse-system reconstruction to CSV

#include <algorithm>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddinv/config.hpp"
#include "ddinv/errors.hpp"
#include "ddinv/report.hpp"
#include "ddinv/scenario.hpp"
#include "ddinv/text_format.hpp"
#include "ddinv/trajectory_io.hpp"

namespace {

using ddinv::experiment::ScenarioConfig;

constexpr int kExitUnstable = 1;
constexpr int kExitError = 2;

// Flags shared by every subcommand. Values stay as strings so they can be
// applied on top of a config file with the file's own syntax.
struct CommonFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out;

  std::string system, past, delay, seed, horizon, state_dim, offline, online,
      init_guess, init_scale, data_length;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value scenario file");
  cmd->add_option("--system", f.system,
                  "stable-zeros | no-zeros | unstable-zero | from-file");
  cmd->add_option("--N", f.past, "past window length N (>= n)");
  cmd->add_option("--L", f.delay, "output delay L, or 'auto'");
  cmd->add_option("--seed", f.seed, "64-bit RNG seed");
  cmd->add_option("--horizon", f.horizon, "number of online estimates");
  cmd->add_option("--n", f.state_dim, "state dimension (from-file data)");
  cmd->add_option("--data-length", f.data_length, "offline samples");
  cmd->add_option("--offline-data", f.offline, "offline trajectory CSV (from-file)");
  cmd->add_option("--online-data", f.online, "online trajectory CSV (from-file)");
  cmd->add_option("--init-guess", f.init_guess, "zero | random");
  cmd->add_option("--init-scale", f.init_scale, "std. dev. of random initial guess");
  cmd->add_option("--out", f.out, "output path");
}

ScenarioConfig resolve_config(const CommonFlags& f) {
  ScenarioConfig config;
  if (!f.config_path.empty()) config = ddinv::experiment::load_config(f.config_path);
  const std::pair<const char*, const std::string*> flags[] = {
      {"system", &f.system},       {"N", &f.past},
      {"L", &f.delay},             {"seed", &f.seed},
      {"horizon", &f.horizon},     {"n", &f.state_dim},
      {"data_length", &f.data_length}, {"offline_data", &f.offline},
      {"online_data", &f.online},  {"init_guess", &f.init_guess},
      {"init_scale", &f.init_scale},
  };
  for (const auto& [key, value] : flags) {
    if (!value->empty()) ddinv::experiment::apply_setting(config, key, *value);
  }
  ddinv::experiment::validate(config);
  return config;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(std::complex<double> z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

void print_summary(const ddinv::experiment::RunReport& r) {
  const auto& trace = r.trace;
  std::cout << "system " << r.metadata.system << "  N=" << r.metadata.past
            << " L=" << r.metadata.delay << " T+1=" << r.metadata.columns << '\n'
            << "rho(R) = " << fmt(r.certificate.spectral_radius) << " ("
            << (r.certificate.schur_stable ? "stable" : "unstable") << ")\n"
            << "estimates: " << trace.steps() << " steps starting at k = "
            << trace.start_step << '\n';
  if (trace.error_norms && trace.steps() > 0) {
    std::cout << "error norm: first " << fmt((*trace.error_norms)(0)) << ", last "
              << fmt((*trace.error_norms)(trace.steps() - 1)) << '\n';
  }
}

std::string indexed_path(const std::string& path, int index) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string() + "." + std::to_string(index);
  return (p.parent_path() / (stem + p.extension().string())).string();
}

int cmd_run(const CommonFlags& f, const std::string& plot, int parallel, int batch) {
  const ScenarioConfig config = resolve_config(f);
  if (parallel > 1 && batch == 1) batch = parallel;
  if (batch > 1) {
    const auto reports = ddinv::experiment::run_batch(config, batch, std::max(parallel, 1));
    for (int i = 0; i < batch; ++i) {
      const auto& r = reports[static_cast<std::size_t>(i)];
      std::cout << "[scenario " << i << ", seed " << config.seed + i << "]\n";
      print_summary(r);
      if (!f.out.empty()) ddinv::experiment::save_report(r, indexed_path(f.out, i));
      if (!plot.empty()) ddinv::experiment::emit_plot_data(r, indexed_path(plot, i));
    }
    return 0;
  }
  const auto report = ddinv::experiment::run_scenario(config);
  print_summary(report);
  if (!f.out.empty()) ddinv::experiment::save_report(report, f.out);
  if (!plot.empty()) ddinv::experiment::emit_plot_data(report, plot);
  return 0;
}

int cmd_certify(const CommonFlags& f, int show) {
  const ScenarioConfig config = resolve_config(f);
  const auto prepared = ddinv::experiment::prepare(config);
  const auto cert = ddinv::estimator::convergence_certificate(prepared.gains);

  auto eig = cert.eigenvalues;
  std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) {
    return std::abs(a) > std::abs(b);
  });
  std::cout << "rho(R) = " << ddinv::io::format_double(cert.spectral_radius) << '\n'
            << "verdict: " << (cert.schur_stable ? "stable" : "unstable") << '\n'
            << "|M_u| = " << fmt(ddinv::linalg::norm2(prepared.gains.input_gain)) << '\n'
            << "eigenvalues of R nearest the unit circle:\n";
  const auto shown = std::min<std::size_t>(eig.size(), static_cast<std::size_t>(show));
  for (std::size_t i = 0; i < shown; ++i) {
    std::cout << "  " << fmt(eig[i]) << "  |" << fmt(std::abs(eig[i])) << "|\n";
  }
  return cert.schur_stable ? 0 : kExitUnstable;
}

int cmd_gen_data(const CommonFlags& f, bool online) {
  const ScenarioConfig config = resolve_config(f);
  ddinv::lti::Trajectory traj;
  if (online) {
    traj = ddinv::experiment::online_trajectory(config, ddinv::experiment::prepare(config));
  } else {
    traj = ddinv::experiment::generate_offline_data(config);
  }
  if (f.out.empty()) {
    ddinv::io::write_trajectory(std::cout, traj);
  } else {
    ddinv::io::save_trajectory(f.out, traj);
  }
  return 0;
}

int cmd_oracle(const CommonFlags& f) {
  const ScenarioConfig config = resolve_config(f);
  const auto result = ddinv::experiment::run_oracle(config);
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw ddinv::InvalidInputError("cannot write '" + f.out + "'");
  }
  std::ostream& out = f.out.empty() ? std::cout : file;
  const auto m = result.estimates.rows();
  out << 'k';
  for (Eigen::Index i = 1; i <= m; ++i) out << ",uhat_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_" << i;
  out << ",error_norm\n";
  for (Eigen::Index k = 0; k < result.estimates.cols(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << ddinv::io::format_double(result.estimates(i, k));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << ddinv::io::format_double(result.truth(i, k));
    out << ',' << ddinv::io::format_double(result.error_norms(k)) << '\n';
  }
  std::cerr << "inverse delay L = " << result.delay
            << (result.state_free ? " (state-free gain, P O_L = 0)" : " (minimum-norm gain)")
            << ", final error " << fmt(result.error_norms(result.error_norms.size() - 1))
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven unknown-input reconstruction from Hankel matrices"};
  app.require_subcommand(1);

  CommonFlags run_flags, cert_flags, gen_flags, oracle_flags;
  std::string plot_path;
  int parallel = 1;
  int batch = 1;
  int show = 6;
  bool online = false;

  auto* run = app.add_subcommand("run", "run a full estimation experiment");
  add_common(run, run_flags);
  run->add_option("--plot", plot_path, "per-step CSV for plotting");
  run->add_option("--parallel", parallel, "worker threads for batch mode")
      ->check(CLI::PositiveNumber);
  run->add_option("--batch", batch, "number of scenarios (seeds seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "print the convergence certificate");
  add_common(certify, cert_flags);
  certify->add_option("--show", show, "number of eigenvalues to print");

  auto* gen = app.add_subcommand("gen-data", "write offline data as trajectory CSV");
  add_common(gen, gen_flags);
  gen->add_flag("--online", online, "write the online trajectory instead");

  auto* oracle = app.add_subcommand("invert-oracle", "model-based inverse reconstruction");
  add_common(oracle, oracle_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags, plot_path, parallel, batch);
    if (*certify) return cmd_certify(cert_flags, show);
    if (*gen) return cmd_gen_data(gen_flags, online);
    if (*oracle) return cmd_oracle(oracle_flags);
  } catch (const ddinv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
