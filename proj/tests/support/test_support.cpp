#include "test_support.hpp"

#include <limits>
#include <map>
#include <mutex>

#include "ddinv/linalg.hpp"

namespace ddinv::testing {

MatrixXd random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> dist;
  MatrixXd out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  }
  return out;
}

MatrixXd random_low_rank(std::mt19937_64& rng, Index rows, Index cols, Index rank) {
  if (rank == 0) return MatrixXd::Zero(rows, cols);
  return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

lti::StateSpaceModel random_model(std::mt19937_64& rng, Index n, Index m, Index p,
                                  double radius) {
  MatrixXd a = random_matrix(rng, n, n);
  const double rho = linalg::spectral_radius(a);
  if (rho > 0) a *= radius / rho;
  return {a, random_matrix(rng, n, m), random_matrix(rng, p, n),
          random_matrix(rng, p, m)};
}

double distance_to_set(std::complex<double> z,
                       const std::vector<std::complex<double>>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : set) best = std::min(best, std::abs(z - w));
  return best;
}

KktOracle::KktOracle(const MatrixXd& objective, const MatrixXd& constraint)
    : objective_(objective), vars_(objective.cols()), constraints_(constraint.rows()) {
  // [A^T A  C^T] [g     ]   [A^T b]
  // [C      0  ] [lambda] = [d    ]
  MatrixXd kkt = MatrixXd::Zero(vars_ + constraints_, vars_ + constraints_);
  kkt.topLeftCorner(vars_, vars_) = objective.transpose() * objective;
  kkt.topRightCorner(vars_, constraints_) = constraint.transpose();
  kkt.bottomLeftCorner(constraints_, vars_) = constraint;
  kkt_.setThreshold(1e-11);
  kkt_.compute(kkt);
}

VectorXd KktOracle::solve(const VectorXd& target, const VectorXd& constraint_rhs) const {
  VectorXd rhs(vars_ + constraints_);
  rhs << objective_.transpose() * target, constraint_rhs;
  return kkt_.solve(rhs).head(vars_);
}

const ReferenceData& reference_data(systems::ReferenceSystem which) {
  static std::mutex mu;
  static std::map<systems::ReferenceSystem, ReferenceData> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(which);
  if (it != cache.end()) return it->second;

  lti::StateSpaceModel model = systems::make(which);
  const Index delay = *lti::inherent_delay(model);
  const Index past = 10;
  std::mt19937_64 rng(1234 + static_cast<int>(which));
  const MatrixXd u = random_matrix(rng, model.m(), 500);
  const lti::Trajectory offline = lti::simulate(model, VectorXd::Zero(model.n()), u);
  auto gains = estimator::build_gains(
      hankel::partition_data(offline.inputs, offline.outputs, past, delay));
  return cache.emplace(which, ReferenceData{std::move(model), delay, std::move(gains)})
      .first->second;
}

lti::Trajectory fresh_trajectory(const lti::StateSpaceModel& model, Index length,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const VectorXd x0 = random_matrix(rng, model.n(), 1);
  return lti::simulate(model, x0, random_matrix(rng, model.m(), length));
}

VectorXd window(const lti::Signal& s, Index k, Index count) {
  return s.middleCols(k, count).reshaped();
}

}  // namespace ddinv::testing
