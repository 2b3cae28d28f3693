#include <gtest/gtest.h>

#include "dwedge/verify.hpp"

using namespace dwedge;

TEST(IdentitySuite, AllResidualsSmall) {
  const auto r = run_identity_suite(2024, 100);
  EXPECT_EQ(r.instances, 100);
  EXPECT_LT(r.schur, 1e-9);
  EXPECT_LT(r.basic, 1e-9);
  EXPECT_LT(r.onesided, 1e-9);
  EXPECT_LT(r.twosided, 1e-9);
  EXPECT_LT(r.ward, 1e-9);
  EXPECT_TRUE(r.pass());
}

TEST(IdentitySuite, Deterministic) {
  const auto a = run_identity_suite(5, 10), b = run_identity_suite(5, 10);
  EXPECT_EQ(a.max(), b.max());
}

// Median |residual| over 200 seeds at N = 100, 200, 400, lambda0 = 0.05,
// eta = N^{-2/3-0.05}: log-log slope -1/3 +- 0.15.
TEST(OpticalSuite, SlopeNearMinusOneThird) {
  const auto r = run_optical_suite({100, 200, 400}, 200, 0.05, 77);
  EXPECT_NEAR(r.slope, -1.0 / 3.0, 0.15) << "medians " << r.medians[0] << " " << r.medians[1] << " " << r.medians[2];
}

TEST(OpticalSuite, MedianDecreasesInN) {
  const auto r = run_optical_suite({100, 200, 400}, 200, 0.05, 78);
  EXPECT_TRUE(r.decreasing) << "medians " << r.medians[0] << " " << r.medians[1] << " " << r.medians[2];
}

TEST(LocalLawSuite, ReportsPercentiles) {
  const auto r = run_local_law_suite(100, 10, {0.0, 0.5}, 3);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NEAR(r.bound, std::pow(100.0, 0.1), 1e-12);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.p95_m, 0.0);
    EXPECT_GT(row.p95_offdiag, 0.0);
    EXPECT_GT(row.p95_diag, 0.0);
  }
}
