#include "ddinv/reference_systems.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddinv::systems {
namespace {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;

lti::StateSpaceModel checked(lti::StateSpaceModel model,
                             std::vector<double> expected_zeros,
                             const char* label) {
  if (!lti::is_minimal(model)) {
    throw std::logic_error(std::string(label) + ": reference model is not minimal");
  }
  const auto zeros = lti::invariant_zeros(model);
  bool ok = zeros.size() == expected_zeros.size();
  std::sort(expected_zeros.begin(), expected_zeros.end());
  for (std::size_t i = 0; ok && i < zeros.size(); ++i) {
    ok = std::abs(zeros[i] - std::complex<double>(expected_zeros[i])) <= 1e-8 &&
         lti::rosenbrock_rank_drops(model, expected_zeros[i]);
  }
  if (!ok) {
    throw std::logic_error(std::string(label) +
                           ": reference model has unexpected invariant zeros");
  }
  return model;
}

// Shared dynamics of the no-zeros and unstable-zero plants.
Matrix4d coupled_dynamics() {
  Matrix4d a;
  // clang-format off
  a <<  0.25,  0.25, 0.0, 0.5,
        0.5,   0.0,  0.0, 0.25,
       -0.25, -0.25, 0.0, 0.0,
        0.25,  0.25, 0.0, 0.0;
  // clang-format on
  return a;
}

}  // namespace

lti::StateSpaceModel stable_zeros_system() {
  Matrix4d a;
  Eigen::Matrix<double, 4, 2> b;
  Eigen::Matrix<double, 2, 4> c;
  // clang-format off
  a << 0.5, 1.0, 0.0, 0.0,
       0.0, 0.6, 0.0, 0.0,
       0.0, 0.0, 0.3, 1.0,
       0.0, 0.0, 0.0, 0.4;
  b << 0, 0,
       1, 0,
       0, 0,
       0, 1;
  c << -1, 5,  0, 0,
        0, 0, -1, 2;
  // clang-format on
  return checked({a, b, c, Matrix2d::Zero()}, {0.7, 0.8}, "stable_zeros_system");
}

lti::StateSpaceModel no_zeros_system() {
  Eigen::Matrix<double, 4, 2> b;
  Eigen::Matrix<double, 2, 4> c;
  // clang-format off
  b <<  0, -1,
        0,  0,
        0,  1,
       -1,  0;
  c << 1, -1,  0, 0,
       1,  0, -1, 0;
  // clang-format on
  return checked({coupled_dynamics(), b, c, Matrix2d::Zero()}, {}, "no_zeros_system");
}

lti::StateSpaceModel unstable_zero_system() {
  Eigen::Matrix<double, 4, 2> b;
  Eigen::Matrix<double, 2, 4> c;
  // clang-format off
  b <<  2, -2,
       -1,  2,
        2,  0,
        0, -1;
  c << 2,  1,  1, -2,
       0, -1, -2, -2;
  // clang-format on
  return checked({coupled_dynamics(), b, c, Matrix2d::Zero()}, {1.25},
                 "unstable_zero_system");
}

lti::StateSpaceModel make(ReferenceSystem which) {
  switch (which) {
    case ReferenceSystem::StableZeros: return stable_zeros_system();
    case ReferenceSystem::NoZeros: return no_zeros_system();
    case ReferenceSystem::UnstableZero: return unstable_zero_system();
  }
  throw std::logic_error("unknown reference system");
}

std::string_view name(ReferenceSystem which) {
  switch (which) {
    case ReferenceSystem::StableZeros: return "stable-zeros";
    case ReferenceSystem::NoZeros: return "no-zeros";
    case ReferenceSystem::UnstableZero: return "unstable-zero";
  }
  return "unknown";
}

}  // namespace ddinv::systems
