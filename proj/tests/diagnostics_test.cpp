#include "silcert/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "silcert/error.hpp"

namespace silcert::diagnostics {
namespace {

std::vector<XYDataset> quartet() {
  std::ifstream in(SILCERT_TEST_DATA_DIR "/anscombe.csv");
  return read_xy_csv(in);
}

// Raw normal equations solved by Cramer's rule.
std::pair<double, double> normal_equations(const XYDataset& d) {
  double n = static_cast<double>(d.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sx += d.x[i];
    sy += d.y[i];
    sxx += d.x[i] * d.x[i];
    sxy += d.x[i] * d.y[i];
  }
  const double det = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

XYDataset without(const XYDataset& d, std::size_t k) {
  XYDataset out{d.name, {}, {}};
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i == k) continue;
    out.x.push_back(d.x[i]);
    out.y.push_back(d.y[i]);
  }
  return out;
}

// Deletion-refit residual scaled by the leave-one-out standard error.
double loo_studentized(const XYDataset& d, std::size_t k) {
  const auto rest = without(d, k);
  const auto [b, a] = normal_equations(rest);
  double sse = 0.0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const double r = rest.y[i] - (a + b * rest.x[i]);
    sse += r * r;
  }
  const double s2 = sse / static_cast<double>(rest.size() - 2);
  double mx = 0.0;
  for (double x : rest.x) mx += x;
  mx /= static_cast<double>(rest.size());
  double sxx = 0.0;
  for (double x : rest.x) sxx += (x - mx) * (x - mx);
  const double pred_var = s2 * (1.0 + 1.0 / static_cast<double>(rest.size()) +
                                (d.x[k] - mx) * (d.x[k] - mx) / sxx);
  return (d.y[k] - (a + b * d.x[k])) / std::sqrt(pred_var);
}

XYDataset random_set(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> nd;
  XYDataset d{"r", {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back(3.0 * nd(gen));
    d.y.push_back(1.5 - 0.7 * d.x.back() + nd(gen));
  }
  return d;
}

TEST(FitLine, ExactLine) {
  const XYDataset d{"line", {1, 2, 3, 4}, {3, 5, 7, 9}};
  const auto f = fit_line(d);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  for (const auto& fl : f.flags) {
    EXPECT_FALSE(fl.outlier);
    EXPECT_FALSE(fl.leverage);
  }
}

TEST(FitLine, RejectsDegenerateInput) {
  EXPECT_THROW(fit_line({"c", {2, 2, 2}, {1, 2, 3}}), InvalidArgument);
  EXPECT_THROW(fit_line({"s", {1, 2}, {1, 2}}), InvalidArgument);
  EXPECT_THROW(fit_line({"m", {1, 2, 3}, {1, 2}}), InvalidArgument);
  EXPECT_THROW(fit_line({"n", {1, 2, NAN}, {1, 2, 3}}), InvalidArgument);
}

TEST(Anscombe, FourSetsOfElevenPoints) {
  const auto sets = quartet();
  ASSERT_EQ(sets.size(), 4u);
  for (const auto& d : sets) EXPECT_EQ(d.size(), 11u);
}

TEST(Anscombe, SummaryStatisticsAgree) {
  for (const auto& d : quartet()) {
    const auto f = fit_line(d);
    EXPECT_NEAR(f.slope, 0.50, 0.005) << d.name;
    EXPECT_NEAR(f.intercept, 3.00, 0.005) << d.name;
    EXPECT_NEAR(f.r_squared, 0.67, 0.005) << d.name;
  }
}

TEST(Anscombe, FlagsOutlierInThirdAndLeverageInFourth) {
  const auto sets = quartet();
  std::size_t total = 0;
  for (std::size_t s = 0; s < 4; ++s) {
    const auto f = fit_line(sets[s]);
    for (std::size_t i = 0; i < f.flags.size(); ++i) {
      total += f.flags[i].outlier + f.flags[i].leverage;
      if (s == 2 && sets[s].x[i] == 13.0) {
        EXPECT_TRUE(f.flags[i].outlier);
      } else if (s == 3 && sets[s].x[i] == 19.0) {
        EXPECT_TRUE(f.flags[i].leverage);
        EXPECT_NEAR(f.hat_values[i], 1.0, 1e-12);
        EXPECT_TRUE(std::isnan(f.studentized[i]));
      } else {
        EXPECT_FALSE(f.flags[i].outlier) << sets[s].name << " x=" << sets[s].x[i];
        EXPECT_FALSE(f.flags[i].leverage) << sets[s].name << " x=" << sets[s].x[i];
      }
    }
  }
  EXPECT_EQ(total, 2u);
}

TEST(FitLineProperty, MatchesNormalEquations) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_set(gen, 5 + t % 40);
    const auto f = fit_line(d);
    const auto [b, a] = normal_equations(d);
    EXPECT_NEAR(f.slope, b, 1e-10);
    EXPECT_NEAR(f.intercept, a, 1e-10);
  }
}

TEST(FitLineProperty, ResidualsOrthogonalToDesign) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_set(gen, 6 + t % 30);
    const auto f = fit_line(d);
    double s = 0.0, sx = 0.0, hat_sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      s += f.residuals[i];
      sx += f.residuals[i] * d.x[i];
      hat_sum += f.hat_values[i];
    }
    EXPECT_NEAR(s, 0.0, 1e-9);
    EXPECT_NEAR(sx, 0.0, 1e-8);
    EXPECT_NEAR(hat_sum, 2.0, 1e-12);
  }
}

TEST(FitLineProperty, StudentizedMatchesDeletionRefit) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_set(gen, 8 + t % 20);
    const auto f = fit_line(d);
    for (std::size_t k = 0; k < d.size(); ++k) {
      EXPECT_NEAR(f.studentized[k], loo_studentized(d, k), 1e-8);
    }
  }
}

TEST(FitLineProperty, HatValueIsSensitivityOfFittedValue) {
  std::mt19937_64 gen(6);
  const auto d = random_set(gen, 15);
  const auto f = fit_line(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    auto bumped = d;
    bumped.y[k] += 1.0;
    const auto g = fit_line(bumped);
    const double dfit = (g.intercept + g.slope * d.x[k]) - (f.intercept + f.slope * d.x[k]);
    EXPECT_NEAR(f.hat_values[k], dfit, 1e-10);
  }
}

TEST(FitLineProperty, RSquaredInvariantUnderAffineRescaling) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 100; ++t) {
    auto d = random_set(gen, 12);
    const double r2 = fit_line(d).r_squared;
    for (auto& x : d.x) x = -4.0 * x + 17.0;
    EXPECT_NEAR(fit_line(d).r_squared, r2, 1e-12);
  }
}

TEST(DetectAnomalies, HigherThresholdNeverAddsFlags) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 100; ++t) {
    auto d = random_set(gen, 20);
    d.y[t % 20] += 8.0;
    d.x[(t + 7) % 20] += 15.0;
    const auto f = fit_line(d);
    const auto loose = detect_anomalies(f, d, {2.0, 1.5});
    const auto strict = detect_anomalies(f, d, {3.5, 2.5});
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_LE(strict[i].outlier, loose[i].outlier);
      EXPECT_LE(strict[i].leverage, loose[i].leverage);
    }
  }
}

TEST(ReadXyCsv, AcceptsTwoColumnFormAndReportsBadRows) {
  std::istringstream two("x,y\n1,2\n2,4\n# note\n3,7\n");
  const auto sets = read_xy_csv(two);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].size(), 3u);

  std::istringstream bad("dataset,x,y\nA,1,2\nA,oops,3\n");
  try {
    read_xy_csv(bad);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace silcert::diagnostics
