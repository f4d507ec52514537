#include "ddinv/lti.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ddinv/errors.hpp"
#include "ddinv/reference_systems.hpp"
#include "test_support.hpp"

namespace ddinv::lti {
namespace {

using testing::distance_to_set;
using testing::random_matrix;
using testing::random_model;

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

StateSpaceModel siso(double a, double b, double c, double d) {
  return {scalar(a), scalar(b), scalar(c), scalar(d)};
}

// x+ = u, y = x: one-step delay in every channel.
StateSpaceModel shift_model(Index m) {
  return {MatrixXd::Zero(m, m), MatrixXd::Identity(m, m), MatrixXd::Identity(m, m),
          MatrixXd::Zero(m, m)};
}

TEST(StateSpaceModel, RejectsInconsistentShapes) {
  EXPECT_THROW(StateSpaceModel(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 1),
                               MatrixXd::Zero(1, 2), MatrixXd::Zero(1, 1)),
               InvalidInputError);
  EXPECT_THROW(StateSpaceModel(MatrixXd::Zero(2, 3), MatrixXd::Zero(2, 1),
                               MatrixXd::Zero(1, 2), MatrixXd::Zero(1, 1)),
               InvalidInputError);
  MatrixXd a = MatrixXd::Zero(1, 1);
  a(0, 0) = std::nan("");
  EXPECT_THROW(StateSpaceModel(a, scalar(1), scalar(1), scalar(0)), InvalidInputError);
}

TEST(Simulate, PureFeedthrough) {
  const StateSpaceModel model(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2),
                              MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
  std::mt19937_64 rng(1);
  const Signal u = random_matrix(rng, 2, 7);
  const Trajectory t = simulate(model, VectorXd::Zero(2), u);
  EXPECT_EQ(t.outputs, u);
  ASSERT_TRUE(t.states.has_value());
  EXPECT_EQ(t.states->cols(), 7);
}

TEST(Simulate, IntegratorByHand) {
  Signal u(1, 3);
  u << 1, 0, 0;
  const Trajectory t = simulate(siso(1, 1, 1, 0), VectorXd::Zero(1), u);
  EXPECT_DOUBLE_EQ(t.outputs(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.outputs(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(t.outputs(0, 2), 1.0);
}

TEST(Simulate, ModalResponse) {
  MatrixXd a(2, 2);
  a << 0.5, 0.0, 0.0, -0.7;
  MatrixXd c(1, 2);
  c << 1.0, 3.0;
  const StateSpaceModel model(a, MatrixXd::Ones(2, 1), c, scalar(4.0));
  const VectorXd x0 = Eigen::Vector2d(0.0, 2.0);
  const Trajectory t = simulate(model, x0, Signal::Zero(1, 10));
  for (Index k = 0; k < 10; ++k) {
    EXPECT_NEAR(t.outputs(0, k), std::pow(-0.7, double(k)) * 6.0, 1e-12);
  }
}

TEST(Simulate, RejectsMismatchedDimensions) {
  EXPECT_THROW(simulate(siso(1, 1, 1, 0), VectorXd::Zero(2), Signal::Zero(1, 3)),
               InvalidInputError);
  EXPECT_THROW(simulate(siso(1, 1, 1, 0), VectorXd::Zero(1), Signal::Zero(2, 3)),
               InvalidInputError);
}

TEST(ObservabilityMatrix, Examples) {
  std::mt19937_64 rng(2);
  const StateSpaceModel model = random_model(rng, 3, 1, 2);
  EXPECT_EQ(observability_matrix(model, 0), model.C());

  const StateSpaceModel ident(MatrixXd::Identity(3, 3), model.B(), model.C(), model.D());
  const MatrixXd o = observability_matrix(ident, 3);
  ASSERT_EQ(o.rows(), 8);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(o.middleRows(2 * i, 2), model.C());

  const MatrixXd powers = observability_matrix(siso(2, 1, 1, 0), 2);
  EXPECT_EQ(powers, Eigen::Vector3d(1, 2, 4));
}

TEST(InvertibilityMatrix, Examples) {
  std::mt19937_64 rng(3);
  const StateSpaceModel model = random_model(rng, 3, 2, 2);
  EXPECT_EQ(invertibility_matrix(model, 0), model.D());

  const StateSpaceModel no_b(model.A(), MatrixXd::Zero(3, 2), model.C(), model.D());
  const MatrixXd blocks = invertibility_matrix(no_b, 2);
  MatrixXd expected = MatrixXd::Zero(6, 6);
  for (Index i = 0; i < 3; ++i) expected.block(2 * i, 2 * i, 2, 2) = model.D();
  EXPECT_EQ(blocks, expected);

  const MatrixXd shift = invertibility_matrix(shift_model(2), 1);
  expected = MatrixXd::Zero(4, 4);
  expected.block(2, 0, 2, 2) = MatrixXd::Identity(2, 2);
  EXPECT_EQ(shift, expected);
}

TEST(InvertibilityMatrix, MarkovStructure) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpaceModel model = random_model(rng, 1 + trial % 5, 2, 3);
    const Index delay = 4;
    const MatrixXd inv = invertibility_matrix(model, delay);
    ASSERT_EQ(inv.rows(), (delay + 1) * 3);
    ASSERT_EQ(inv.cols(), (delay + 1) * 2);
    for (Index i = 0; i <= delay; ++i) {
      for (Index j = 0; j <= delay; ++j) {
        MatrixXd expected;
        if (i == j) {
          expected = model.D();
        } else if (i > j) {
          MatrixXd power = MatrixXd::Identity(model.n(), model.n());
          for (Index s = 0; s < i - j - 1; ++s) power = power * model.A();
          expected = model.C() * power * model.B();
        } else {
          expected = MatrixXd::Zero(3, 2);
        }
        EXPECT_LT((inv.block(3 * i, 2 * j, 3, 2) - expected).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(StackedOutputIdentity, RandomModels) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<Index> dim(1, 4);
    const StateSpaceModel model = random_model(rng, dim(rng), dim(rng), dim(rng));
    const Index delay = trial % 7;
    const VectorXd x0 = random_matrix(rng, model.n(), 1);
    EXPECT_TRUE(stacked_output_identity_check(model, x0,
                                              random_matrix(rng, model.m(), 20), delay));
  }
}

TEST(StackedOutputIdentity, FeedthroughAndNegativeControl) {
  const StateSpaceModel feed(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 2),
                             MatrixXd::Zero(2, 1), MatrixXd::Identity(2, 2));
  std::mt19937_64 rng(6);
  EXPECT_TRUE(stacked_output_identity_check(feed, VectorXd::Zero(1),
                                            random_matrix(rng, 2, 8), 2));

  const StateSpaceModel model = random_model(rng, 3, 2, 2);
  const Trajectory t = simulate(model, random_matrix(rng, 3, 1), random_matrix(rng, 2, 15));
  const MatrixXd obs = observability_matrix(model, 3);
  MatrixXd inv = invertibility_matrix(model, 3);
  EXPECT_TRUE(stacked_output_identity_holds(t, obs, inv, 3));
  inv(4, 1) += 1e-3;
  EXPECT_FALSE(stacked_output_identity_holds(t, obs, inv, 3));
}

TEST(InvariantZeros, SisoTransferFunctionZero) {
  const auto zeros = invariant_zeros(siso(0.5, 1, 1, 1));
  ASSERT_EQ(zeros.size(), 1u);
  EXPECT_NEAR(std::abs(zeros[0] - (-0.5)), 0.0, 1e-12);
}

TEST(InvariantZeros, ReferenceSystems) {
  EXPECT_TRUE(invariant_zeros(systems::no_zeros_system()).empty());

  const auto stable = invariant_zeros(systems::stable_zeros_system());
  ASSERT_EQ(stable.size(), 2u);
  EXPECT_LT(distance_to_set(0.7, stable), 1e-8);
  EXPECT_LT(distance_to_set(0.8, stable), 1e-8);

  const auto unstable = invariant_zeros(systems::unstable_zero_system());
  EXPECT_LT(distance_to_set(1.25, unstable), 1e-8);
}

TEST(InvariantZeros, TallPencil) {
  // y = [x + u; 2x + 2u]: the second row is redundant, zero stays at -0.5.
  MatrixXd c(2, 1), d(2, 1);
  c << 1, 2;
  d << 1, 2;
  const StateSpaceModel redundant(scalar(0.5), scalar(1), c, d);
  const auto zeros = invariant_zeros(redundant);
  ASSERT_EQ(zeros.size(), 1u);
  EXPECT_NEAR(std::abs(zeros[0] - (-0.5)), 0.0, 1e-10);

  // y = [x + u; u] separates x and u: no zeros.
  c << 1, 0;
  d << 1, 1;
  EXPECT_TRUE(invariant_zeros(StateSpaceModel(scalar(0.5), scalar(1), c, d)).empty());
}

TEST(InvariantZeros, RejectsWideSystems) {
  const StateSpaceModel wide(scalar(0.5), MatrixXd::Ones(1, 2), scalar(1),
                             MatrixXd::Zero(1, 2));
  EXPECT_THROW(invariant_zeros(wide), UnsupportedShapeError);
  EXPECT_THROW(classify_zeros(wide), UnsupportedShapeError);
}

TEST(InvariantZeros, RankDropVerified) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpaceModel model = random_model(rng, 1 + trial % 4, 2, 2 + trial % 2);
    for (const auto& z : invariant_zeros(model)) {
      EXPECT_TRUE(rosenbrock_rank_drops(model, z));
      EXPECT_LT(rosenbrock_rank_gap(model, z), 1e-8);
    }
  }
}

TEST(InherentDelay, Examples) {
  EXPECT_EQ(inherent_delay(siso(0.3, 1, 1, 2)), Index{0});
  EXPECT_EQ(inherent_delay(shift_model(2)), Index{1});
  const StateSpaceModel blind(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                              MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2));
  EXPECT_FALSE(inherent_delay(blind).has_value());
}

TEST(InherentDelay, ReferenceSystems) {
  EXPECT_EQ(inherent_delay(systems::stable_zeros_system()), Index{1});
  EXPECT_EQ(inherent_delay(systems::no_zeros_system()), Index{3});
  EXPECT_EQ(inherent_delay(systems::unstable_zero_system()), Index{2});
}

TEST(InherentDelay, BoundedByStateDimension) {
  std::mt19937_64 rng(8);
  int invertible = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 5;
    // D = 0 makes the delay depend on the Markov parameters.
    const StateSpaceModel r = random_model(rng, n, 2, 2 + trial % 2);
    const StateSpaceModel model(r.A(), r.B(), r.C(), MatrixXd::Zero(r.p(), 2));
    const auto delay = inherent_delay(model, n + 3);
    if (!delay) continue;
    ++invertible;
    EXPECT_LE(*delay, n);
  }
  EXPECT_GT(invertible, 10);
}

TEST(LeftInverseGain, Examples) {
  const StateSpaceModel direct(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                               MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
  EXPECT_LT((left_inverse_gain(direct, 0) - MatrixXd::Identity(2, 2)).norm(), 1e-12);

  MatrixXd expected = MatrixXd::Zero(2, 4);
  expected.rightCols(2) = MatrixXd::Identity(2, 2);
  EXPECT_LT((left_inverse_gain(shift_model(2), 1) - expected).norm(), 1e-12);

  const StateSpaceModel blind(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                              MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2));
  try {
    left_inverse_gain(blind, 2);
    FAIL() << "expected NoLeftInverseError";
  } catch (const NoLeftInverseError& e) {
    EXPECT_GT(e.residual(), 1e-8);
  }
}

TEST(InverseSystem, Examples) {
  std::mt19937_64 rng(9);
  const StateSpaceModel r = random_model(rng, 3, 2, 2);
  const StateSpaceModel unit_d(r.A(), r.B(), r.C(), MatrixXd::Identity(2, 2));
  const InverseSystem inv = inverse_system(unit_d, MatrixXd::Identity(2, 2), 0);
  EXPECT_LT((inv.a - (r.A() - r.B() * r.C())).norm(), 1e-12);
  EXPECT_LT((inv.c + r.C()).norm(), 1e-12);
  EXPECT_EQ(inv.d, MatrixXd::Identity(2, 2));

  const StateSpaceModel no_b(r.A(), MatrixXd::Zero(3, 2), r.C(), MatrixXd::Identity(2, 2));
  const InverseSystem inv2 = inverse_system(no_b, MatrixXd::Identity(2, 2), 0);
  EXPECT_EQ(inv2.a, r.A());
  EXPECT_EQ(inv2.b, MatrixXd::Zero(3, 2));

  EXPECT_THROW(inverse_system(unit_d, 2.0 * MatrixXd::Identity(2, 2), 0), InvalidGainError);
}

TEST(InverseSystem, ZerosAreInverseEigenvalues) {
  for (auto which : testing::kAllReferenceSystems) {
    const StateSpaceModel model = systems::make(which);
    const Index delay = *inherent_delay(model);
    const InverseSystem inv = inverse_system(model, left_inverse_gain(model, delay), delay);
    const auto spectrum = linalg::eigenvalues(inv.a);
    for (const auto& z : invariant_zeros(model)) EXPECT_LT(distance_to_set(z, spectrum), 1e-6);
  }
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpaceModel model = random_model(rng, 2 + trial % 3, 2, 2 + trial % 2);
    const Index delay = *inherent_delay(model);
    const InverseSystem inv = inverse_system(model, left_inverse_gain(model, delay), delay);
    const auto spectrum = linalg::eigenvalues(inv.a);
    for (const auto& z : invariant_zeros(model)) EXPECT_LT(distance_to_set(z, spectrum), 1e-6);
  }
}

TEST(ModelBasedReconstruct, ExactInitialisation) {
  for (auto which : testing::kAllReferenceSystems) {
    const StateSpaceModel model = systems::make(which);
    const Index delay = *inherent_delay(model);
    const Trajectory t = testing::fresh_trajectory(model, 60, 11);
    const InverseSystem inv = inverse_system(model, left_inverse_gain(model, delay), delay);
    const Signal u_hat = model_based_reconstruct(inv, t.states->col(0), t.outputs);
    ASSERT_EQ(u_hat.cols(), 60 - delay);
    EXPECT_LT((u_hat - t.inputs.leftCols(60 - delay)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ModelBasedReconstruct, StateFreeGainIgnoresInitialState) {
  const StateSpaceModel model = systems::no_zeros_system();
  const Index delay = *inherent_delay(model);
  const MatrixXd gain = state_free_inverse_gain(model, delay);
  EXPECT_LT((gain * observability_matrix(model, delay)).norm(), 1e-8);
  const Trajectory t = testing::fresh_trajectory(model, 40, 12);
  const InverseSystem inv = inverse_system(model, gain, delay);
  std::mt19937_64 rng(13);
  const Signal u_hat = model_based_reconstruct(inv, random_matrix(rng, 4, 1), t.outputs);
  EXPECT_LT((u_hat - t.inputs.leftCols(u_hat.cols())).cwiseAbs().maxCoeff(), 1e-8);

  EXPECT_THROW(state_free_inverse_gain(systems::stable_zeros_system(), 4), NoLeftInverseError);
}

TEST(ModelBasedReconstruct, StableZerosForgetWrongInitialState) {
  const StateSpaceModel model = systems::stable_zeros_system();
  const Index delay = *inherent_delay(model);
  const Trajectory t = testing::fresh_trajectory(model, 200, 14);
  const InverseSystem inv = inverse_system(model, left_inverse_gain(model, delay), delay);
  const Signal u_hat = model_based_reconstruct(inv, VectorXd::Zero(4), t.outputs);
  const VectorXd err = (u_hat - t.inputs.leftCols(u_hat.cols())).colwise().norm();
  EXPECT_GT(err(0), 1e-3);
  EXPECT_LT(err.tail(20).maxCoeff(), 1e-12);
  // Geometric decay at the rate of the slowest zero (0.8), with slack.
  EXPECT_LT(err(100), err(0) * std::pow(0.85, 100.0) + 1e-14);
}

TEST(ModelBasedReconstruct, RejectsShortOutput) {
  const StateSpaceModel model = shift_model(1);
  const InverseSystem inv = inverse_system(model, left_inverse_gain(model, 1), 1);
  EXPECT_THROW(model_based_reconstruct(inv, VectorXd::Zero(1), Signal::Zero(1, 1)),
               InvalidInputError);
}

TEST(StrongObservability, Examples) {
  EXPECT_TRUE(strong_observability_check(systems::no_zeros_system()));
  EXPECT_FALSE(strong_observability_check(systems::stable_zeros_system()));
  EXPECT_FALSE(strong_observability_check(systems::unstable_zero_system()));
  const StateSpaceModel full_state(MatrixXd::Identity(3, 3) * 0.5, MatrixXd::Zero(3, 1),
                                   MatrixXd::Identity(3, 3), MatrixXd::Zero(3, 1));
  EXPECT_TRUE(strong_observability_check(full_state));
}

TEST(StrongObservability, AgreesWithZeroSet) {
  std::mt19937_64 rng(15);
  int with_zeros = 0, without = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 4;
    const Index p = 2 + trial % 2;
    const StateSpaceModel r = random_model(rng, n, 2, p);
    // Alternate D = 0 and random D to vary the zero structure.
    const StateSpaceModel model = trial % 2 ? r : StateSpaceModel(r.A(), r.B(), r.C(), MatrixXd::Zero(p, 2));
    const bool empty = invariant_zeros(model).empty();
    (empty ? without : with_zeros)++;
    EXPECT_EQ(strong_observability_check(model), empty) << "trial " << trial;
  }
  EXPECT_GT(with_zeros, 0);
  EXPECT_GT(without, 0);
}

TEST(ClassifyZeros, ReferenceSystems) {
  const auto stable = classify_zeros(systems::stable_zeros_system());
  EXPECT_EQ(stable.category, ZeroCategory::AllStable);
  EXPECT_NEAR(stable.max_modulus, 0.8, 1e-8);

  const auto unstable = classify_zeros(systems::unstable_zero_system());
  EXPECT_EQ(unstable.category, ZeroCategory::MarginalOrUnstable);
  EXPECT_NEAR(unstable.max_modulus, 1.25, 1e-8);

  const auto none = classify_zeros(systems::no_zeros_system());
  EXPECT_EQ(none.category, ZeroCategory::NoZeros);
  EXPECT_EQ(none.max_modulus, 0.0);
}

TEST(ClassifyZeros, MarginalZeroIsNotStable) {
  // (z - 1)/(z - 0.5): zero on the unit circle.
  EXPECT_EQ(classify_zeros(siso(0.5, 1, -0.5, 1)).category, ZeroCategory::MarginalOrUnstable);
}

TEST(Minimality, ReferenceSystemsAreMinimal) {
  for (auto which : testing::kAllReferenceSystems) EXPECT_TRUE(is_minimal(systems::make(which)));
  const StateSpaceModel hidden(MatrixXd::Identity(2, 2) * 0.5, Eigen::Vector2d(1, 0),
                               Eigen::RowVector2d(1, 0), scalar(0));
  EXPECT_FALSE(is_controllable(hidden));
  EXPECT_FALSE(is_observable(hidden));
}

}  // namespace
}  // namespace ddinv::lti
