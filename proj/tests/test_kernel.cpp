#include <cmath>

#include <gtest/gtest.h>

#include "cdpp/kernel.hpp"
#include "oracles.hpp"

using namespace cdpp;

namespace {

DataMatrix column(std::initializer_list<double> v) {
  RowMatrix x(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double d : v) x(i++, 0) = d;
  return DataMatrix(x);
}

DataMatrix sample_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return DataMatrix(oracle::random_points(n, p, rng));
}

}  // namespace

TEST(Bandwidth, TwoPointsGiveSquaredDistance) {
  RowMatrix x(2, 2);
  x << 0.0, 0.0, 3.0, 4.0;
  EXPECT_DOUBLE_EQ(estimate_bandwidth(DataMatrix(x)), 25.0);
}

TEST(Bandwidth, ThreeCollinearPoints) { EXPECT_DOUBLE_EQ(estimate_bandwidth(column({0.0, 1.0, 2.0})), 2.0); }

TEST(Bandwidth, ScalesQuadratically) {
  const auto d = sample_data(12, 3, 5);
  const double base = estimate_bandwidth(d);
  for (double c : {0.1, 2.0, 37.5}) {
    const DataMatrix scaled(RowMatrix(d.values() * c));
    EXPECT_NEAR(estimate_bandwidth(scaled), c * c * base, 1e-12 * c * c * base);
  }
}

TEST(Bandwidth, IdenticalPointsAreRejected) {
  try {
    estimate_bandwidth(column({3.0, 3.0, 3.0}));
    FAIL() << "expected DegenerateData";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateData);
  }
}

TEST(DataMatrixTest, RejectsNonFiniteAndTinyInputs) {
  RowMatrix x(2, 1);
  x << 1.0, std::nan("");
  EXPECT_THROW(DataMatrix{x}, Error);
  EXPECT_THROW(DataMatrix{RowMatrix(1, 3)}, Error);
}

TEST(RbfKernel, DiagonalIsOneAndUnitExponentGivesInverseE) {
  const auto d = column({0.0, 1.0, 2.0});
  const BandwidthConfig cfg{0.5, 1.0};  // 2 s sigma2 = 1, so |x_0 - x_1|^2 = 1 is a unit exponent
  const auto l = build_rbf_kernel(d, cfg);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(l(i, i), 1.0);
  EXPECT_NEAR(l(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(l(0, 2), std::exp(-4.0), 1e-15);
  EXPECT_EQ(l(0, 2), l(2, 0));
}

TEST(RbfKernel, RejectsNonPositiveBandwidth) {
  const auto d = column({0.0, 1.0});
  EXPECT_THROW(build_rbf_kernel(d, BandwidthConfig{0.0, 1.0}), Error);
  EXPECT_THROW(build_rbf_kernel(d, BandwidthConfig{1.0, 0.0}), Error);
}

TEST(RbfKernel, MatchesDirectFormula) {
  const auto d = sample_data(9, 4, 11);
  const double sigma2 = estimate_bandwidth(d);
  const auto l = build_rbf_kernel(d, {sigma2, 1.5});
  const Matrix ref = oracle::rbf(d.values(), 2.0 * 1.5 * sigma2);
  EXPECT_LE((l.entries() - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RbfKernel, ScaleInvarianceWithEstimatedBandwidth) {
  const auto d = sample_data(15, 3, 2);
  const auto base = build_rbf_kernel(d, {estimate_bandwidth(d), 1.0});
  for (double c : {0.01, 3.0, 1000.0}) {
    const DataMatrix scaled(RowMatrix(d.values() * c));
    const auto l = build_rbf_kernel(scaled, {estimate_bandwidth(scaled), 1.0});
    EXPECT_LE((l.entries() - base.entries()).cwiseAbs().maxCoeff(), 1e-12) << "c=" << c;
  }
}

TEST(RbfKernel, TranslationAndRotationInvariance) {
  const auto d = sample_data(10, 2, 3);
  const BandwidthConfig cfg{estimate_bandwidth(d), 1.0};
  const auto base = build_rbf_kernel(d, cfg);

  RowMatrix shifted = d.values();
  shifted.rowwise() += Eigen::RowVector2d(5.0, -7.0);
  EXPECT_LE((build_rbf_kernel(DataMatrix(shifted), cfg).entries() - base.entries()).cwiseAbs().maxCoeff(), 1e-12);

  const double t = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const RowMatrix rotated = d.values() * rot.transpose();
  EXPECT_LE((build_rbf_kernel(DataMatrix(rotated), cfg).entries() - base.entries()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KernelMatrixTest, RejectsAsymmetricInput) {
  Matrix m(2, 2);
  m << 1.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(KernelMatrix::from_dense(m), Error);
}

TEST(Eigendecompose, IdentityHasUnitSpectrum) {
  const auto s = eigendecompose(KernelMatrix::from_dense(Matrix::Identity(4, 4)));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(s.eigenvalues(i), 1.0, 1e-14);
  EXPECT_LE((s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Eigendecompose, AllOnesTwoByTwo) {
  const auto s = eigendecompose(KernelMatrix::from_dense(Matrix::Ones(2, 2)));
  EXPECT_NEAR(s.eigenvalues(0), 2.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues(1), 0.0, 1e-14);
  EXPECT_GE(s.eigenvalues(1), 0.0);
}

TEST(Eigendecompose, ReconstructionOrthonormalityAndTrace) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = sample_data(5, 3, seed);
    const auto l = build_rbf_kernel(d, {estimate_bandwidth(d), 1.0});
    const auto s = eigendecompose(l);
    const Matrix rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    EXPECT_LE((rebuilt - l.entries()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(s.eigenvalues.sum(), 5.0, 1e-6);
    for (Eigen::Index i = 0; i + 1 < 5; ++i) EXPECT_GE(s.eigenvalues(i), s.eigenvalues(i + 1));
    EXPECT_GE(s.eigenvalues.minCoeff(), 0.0);
  }
}

TEST(Eigendecompose, LargerKernelKeepsInvariants) {
  const auto d = sample_data(120, 4, 9);
  const auto l = build_rbf_kernel(d, {estimate_bandwidth(d), 1.0});
  Eigen::SelfAdjointEigenSolver<Matrix> raw(l.entries(), Eigen::EigenvaluesOnly);
  EXPECT_GE(raw.eigenvalues().minCoeff(), -psd_tolerance(120));
  const auto s = eigendecompose(l);
  const Matrix rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  EXPECT_LE((rebuilt - l.entries()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(s.eigenvalues.sum(), 120.0, 1e-6);
}

TEST(Eigendecompose, IndefiniteMatrixIsANumericalFailure) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  try {
    eigendecompose(KernelMatrix::from_dense(m));
    FAIL() << "expected NumericalFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalFailure);
  }
}
