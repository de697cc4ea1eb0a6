#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gaussmc/covariance.hpp"
#include "gaussmc/errors.hpp"
#include "test_util.hpp"

using namespace gaussmc;

TEST(Column, IdentityUnitVector) {
  const auto m = CovarianceModel::identity(3);
  EXPECT_EQ(m.column(1), (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(Column, ScaledExponentialGridFour) {
  const auto locs = grid_locations(4);
  const auto m = CovarianceModel::scaled_exponential(locs, 10.0, 7.44 / 8.0);
  const auto c = m.column(0);
  EXPECT_EQ(c[0], 1.0);
  for (std::size_t j = 1; j < 4; ++j) {
    const double dist = std::hypot(locs[0].x - locs[j].x, locs[0].y - locs[j].y);
    EXPECT_NEAR(c[j], 0.93 * std::exp(-dist / 10.0), 1e-15);
  }
}

TEST(Column, DenseDirectRead) {
  const auto m = CovarianceModel::dense({1.0, 0.5, 0.5, 1.0}, 2);
  EXPECT_EQ(m.column(1), (std::vector<double>{0.5, 1.0}));
}

TEST(Column, OutOfRange) {
  const auto m = CovarianceModel::identity(3);
  EXPECT_THROW(m.column(3), ArgumentError);
  EXPECT_THROW(m.entry(0, 5), ArgumentError);
  std::vector<double> small(2);
  EXPECT_THROW(m.column(0, small), ArgumentError);
}

TEST(GridLocations, FourPoints) {
  const auto p = grid_locations(4);
  ASSERT_EQ(p.size(), 4u);
  const double want[4][2] = {{0, 0}, {0, 0.5}, {0.5, 0}, {0.5, 0.5}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(p[i].x, want[i][0]);
    EXPECT_EQ(p[i].y, want[i][1]);
  }
}

TEST(GridLocations, ThreePoints) {
  const auto p = grid_locations(3);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[2].x, 0.5);
  EXPECT_EQ(p[2].y, 0.0);
  EXPECT_EQ(p[1].x, 0.0);
  EXPECT_EQ(p[1].y, 0.5);
}

TEST(GridLocations, NinePointFive) {
  const auto p = grid_locations(9);
  EXPECT_DOUBLE_EQ(p[5].x, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[5].y, 2.0 / 3.0);
}

TEST(GridLocations, CoordinatesInUnitSquare) {
  for (std::size_t d : {1u, 2u, 10u, 99u, 100u, 101u, 1000u}) {
    const auto p = grid_locations(d);
    ASSERT_EQ(p.size(), d);
    for (const auto& q : p) {
      EXPECT_GE(q.x, 0.0);
      EXPECT_LT(q.x, 1.0);
      EXPECT_GE(q.y, 0.0);
      EXPECT_LT(q.y, 1.0);
    }
  }
}

TEST(GridLocations, PerfectSquaresExact) {
  // ceil(sqrt(k^2)) must be k even where sqrt rounds up.
  for (std::size_t k = 1; k < 400; ++k) {
    const auto p = grid_locations(k * k);
    EXPECT_DOUBLE_EQ(p.back().x, static_cast<double>(k - 1) / static_cast<double>(k));
  }
}

TEST(Distance, StableForExtremes) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3e200, 4e200}), 5e200);
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3e-200, 4e-200}), 5e-200);
  EXPECT_EQ(distance({1, 1}, {1, 1}), 0.0);
}

TEST(Validate, Identity) {
  const auto r = validate(CovarianceModel::identity(5));
  EXPECT_TRUE(r.symmetric);
  EXPECT_TRUE(r.unit_diagonal);
  EXPECT_NEAR(r.min_eigenvalue, 1.0, 1e-14);
}

TEST(Validate, RankOne) {
  const auto r = validate(CovarianceModel::dense({1, 1, 1, 1}, 2));
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-10);
}

TEST(Validate, WeatherKernelTwentyFive) {
  const auto r = validate(fixtures::weather_model(25));
  EXPECT_TRUE(r.symmetric);
  EXPECT_TRUE(r.unit_diagonal);
  EXPECT_GE(r.min_eigenvalue, 0.07);
}

TEST(Validate, CapExceeded) {
  EXPECT_THROW(validate(CovarianceModel::identity(100), kSymTol, 50), CapacityError);
  EXPECT_THROW(CovarianceModel::identity(100).materialize(50), CapacityError);
}

TEST(Dense, RejectsBadInput) {
  EXPECT_THROW(CovarianceModel::dense({1, 0.5, 0.5}, 2), ArgumentError);
  EXPECT_THROW(CovarianceModel::dense({2, 0, 0, 1}, 2), ArgumentError);
  EXPECT_THROW(CovarianceModel::dense({1, 1.5, 1.5, 1}, 2), ArgumentError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(CovarianceModel::dense({1, nan, nan, 1}, 2), ArgumentError);
  EXPECT_THROW(CovarianceModel::dense({}, 0), ArgumentError);
}

TEST(Dense, SmallAsymmetryAccepted) {
  const auto m = CovarianceModel::dense({1, 0.5, 0.5 + 1e-12, 1}, 2);
  EXPECT_FALSE(m.symmetrized());
  EXPECT_EQ(m.entry(0, 1), m.entry(1, 0));
}

TEST(Dense, LargeAsymmetrySymmetrized) {
  const auto m = CovarianceModel::dense({1, 0.4, 0.6, 1}, 2);
  EXPECT_TRUE(m.symmetrized());
  EXPECT_DOUBLE_EQ(m.entry(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.entry(1, 0), 0.5);
}

TEST(Kernels, RejectBadParameters) {
  const auto locs = grid_locations(4);
  EXPECT_THROW(CovarianceModel::powered_exponential(locs, 0.0, 1.0), ArgumentError);
  EXPECT_THROW(CovarianceModel::powered_exponential(locs, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(CovarianceModel::powered_exponential(locs, 1.0, 2.5), ArgumentError);
  EXPECT_THROW(CovarianceModel::scaled_exponential(locs, 1.0, 1.0), ArgumentError);
  EXPECT_THROW(CovarianceModel::scaled_exponential(locs, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(CovarianceModel::scaled_exponential(locs, -1.0, 0.5), ArgumentError);
  EXPECT_THROW(CovarianceModel::scaled_exponential({}, 1.0, 0.5), ArgumentError);
  EXPECT_NO_THROW(CovarianceModel::powered_exponential(locs, 1.0, 2.0));
}

namespace {

std::vector<CovarianceModel> all_variants() {
  return {CovarianceModel::identity(7), fixtures::dense_model(fixtures::random_correlation(7, 3)),
          CovarianceModel::powered_exponential(grid_locations(7), 0.7, 1.5), fixtures::weather_model(7)};
}

}  // namespace

TEST(Properties, ColumnMatchesMaterializedMatrix) {
  for (const auto& m : all_variants()) {
    const auto full = m.materialize();
    for (std::size_t i = 0; i < m.dim(); ++i) {
      const auto c = m.column(i);
      for (std::size_t j = 0; j < m.dim(); ++j) {
        const double want = full(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        if (m.kind() == ModelKind::Dense)
          EXPECT_EQ(c[j], want);
        else
          EXPECT_NEAR(c[j], want, 1e-12);
        EXPECT_EQ(c[j], m.entry(j, i));
      }
    }
  }
}

TEST(Properties, SymmetricUnitDiagonalBounded) {
  for (const auto& m : all_variants()) {
    for (std::size_t i = 0; i < m.dim(); ++i) {
      EXPECT_EQ(m.entry(i, i), 1.0);
      for (std::size_t j = 0; j < m.dim(); ++j) {
        EXPECT_EQ(m.entry(i, j), m.entry(j, i));
        EXPECT_LE(std::abs(m.entry(i, j)), 1.0);
      }
    }
  }
}

TEST(Properties, ScaledExponentialEigenvalueFloor) {
  RngStream s(17, 0);
  const auto full = grid_locations(400);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 20 + s.next_index(181);
    std::vector<Point2> subset;
    for (std::size_t k = 0; k < d; ++k) subset.push_back(full[s.next_index(full.size())]);
    // Duplicate points would make the kernel singular in its off-diagonal part
    // but the diagonal gap 1 - ratio keeps the floor.
    const double ratio = 0.5 + 0.49 * s.next_uniform();
    const auto r = validate(CovarianceModel::scaled_exponential(subset, 10.0, ratio));
    EXPECT_GE(r.min_eigenvalue, 1.0 - ratio - 1e-9) << "d=" << d << " ratio=" << ratio;
  }
}

TEST(Properties, PoweredExponentialMonotoneInDistance) {
  std::vector<Point2> line;
  for (int k = 0; k < 30; ++k) line.push_back({0.1 * k, 0.0});
  for (double theta : {0.5, 1.0, 2.0}) {
    const auto m = CovarianceModel::powered_exponential(line, 0.8, theta);
    for (std::size_t j = 1; j < line.size(); ++j) {
      EXPECT_GT(m.entry(0, j), 0.0);
      EXPECT_LE(m.entry(0, j), 1.0);
      EXPECT_LT(m.entry(0, j), m.entry(0, j - 1));
    }
  }
}

TEST(Properties, KernelStoresNoMatrix) {
  const auto m = fixtures::weather_model(100000);
  EXPECT_TRUE(m.dense_values().empty());
  EXPECT_EQ(m.locations().size(), 100000u);
  EXPECT_EQ(m.column(99999).size(), 100000u);
}

TEST(Model, KindNames) {
  EXPECT_EQ(to_string(ModelKind::Dense), "dense");
  EXPECT_EQ(to_string(ModelKind::Identity), "identity");
  EXPECT_EQ(to_string(ModelKind::PoweredExponential), "powexp");
  EXPECT_EQ(to_string(ModelKind::ScaledExponential), "scaledexp");
}
