#pragma once

// Straight-line least squares with the checks that separate a good fit from
// a misleading one: goodness of fit, outliers and leverage points.

#include <istream>
#include <string>
#include <vector>

namespace silcert::diagnostics {

struct XYDataset {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;

  // n >= 3, equal lengths, finite values, x not all identical.
  void validate() const;
  std::size_t size() const { return x.size(); }
};

struct PointFlags {
  bool outlier = false;
  bool leverage = false;
};

struct AnomalyThresholds {
  double studentized = 3.0;     // |externally studentized residual| above this is an outlier
  double leverage_factor = 2.0; // hat value above factor * (2 / n) is a leverage point
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
  std::vector<double> hat_values;
  // Externally studentized residuals; NaN where the point has hat value 1
  // (the fit passes through it by construction).
  std::vector<double> studentized;
  std::vector<PointFlags> flags;
};

RegressionFit fit_line(const XYDataset& data, const AnomalyThresholds& thresholds = {});

std::vector<PointFlags> detect_anomalies(const RegressionFit& fit, const XYDataset& data,
                                         const AnomalyThresholds& thresholds = {});

// Reads `dataset,x,y` rows (header required, '#' lines ignored) and groups
// them by dataset name in first-appearance order.
std::vector<XYDataset> read_xy_csv(std::istream& in);

}  // namespace silcert::diagnostics
