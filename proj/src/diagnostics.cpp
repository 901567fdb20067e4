#include "silcert/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "silcert/error.hpp"

namespace silcert::diagnostics {
namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || !std::isfinite(v)) {
    throw InvalidArgument("line " + std::to_string(line_no) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

}  // namespace

void XYDataset::validate() const {
  if (x.size() != y.size()) throw InvalidArgument(name + ": x and y lengths differ");
  if (x.size() < 3) throw InvalidArgument(name + ": need at least 3 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InvalidArgument(name + ": values must be finite");
    }
  }
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    throw InvalidArgument(name + ": x values are all identical, slope is undefined");
  }
}

RegressionFit fit_line(const XYDataset& data, const AnomalyThresholds& thresholds) {
  data.validate();
  const std::size_t n = data.size();
  const double xbar = mean(data.x);
  const double ybar = mean(data.y);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = data.x[i] - xbar;
    const double dy = data.y[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double sse = 0.0;
  fit.residuals.resize(n);
  fit.hat_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = data.y[i] - (fit.intercept + fit.slope * data.x[i]);
    sse += fit.residuals[i] * fit.residuals[i];
    const double dx = data.x[i] - xbar;
    fit.hat_values[i] = 1.0 / static_cast<double>(n) + dx * dx / sxx;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;

  // Residuals at rounding level mean the line is exact; studentizing them
  // would only amplify noise.
  double y_scale = 0.0;
  for (double y : data.y) y_scale += y * y;
  const bool exact = sse <= 1e-24 * std::max(syy, y_scale);
  fit.studentized.resize(n);
  const double dof = static_cast<double>(n) - 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double one_minus_h = 1.0 - fit.hat_values[i];
    if (one_minus_h <= 1e-10) {
      fit.studentized[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (exact) {
      fit.studentized[i] = 0.0;
      continue;
    }
    const double e = fit.residuals[i];
    const double s2_deleted = dof > 0.0 ? std::max(0.0, (sse - e * e / one_minus_h) / dof) : 0.0;
    const double denom = std::sqrt(s2_deleted * one_minus_h);
    if (denom > 0.0) {
      fit.studentized[i] = e / denom;
    } else {
      fit.studentized[i] = e == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), e);
    }
  }
  fit.flags = detect_anomalies(fit, data, thresholds);
  return fit;
}

std::vector<PointFlags> detect_anomalies(const RegressionFit& fit, const XYDataset& data,
                                         const AnomalyThresholds& thresholds) {
  const std::size_t n = data.size();
  if (fit.studentized.size() != n || fit.hat_values.size() != n) {
    throw InvalidArgument("detect_anomalies: fit does not belong to this data set");
  }
  const double leverage_cut = thresholds.leverage_factor * 2.0 / static_cast<double>(n);
  std::vector<PointFlags> flags(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = fit.studentized[i];
    flags[i].outlier = !std::isnan(t) && std::fabs(t) > thresholds.studentized;
    flags[i].leverage = fit.hat_values[i] > leverage_cut;
  }
  return flags;
}

std::vector<XYDataset> read_xy_csv(std::istream& in) {
  std::vector<XYDataset> out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool named = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t);
    if (!have_header) {
      if (cells == std::vector<std::string>{"dataset", "x", "y"}) {
        named = true;
      } else if (cells != std::vector<std::string>{"x", "y"}) {
        throw InvalidArgument("line " + std::to_string(line_no) +
                              ": expected header 'dataset,x,y' or 'x,y'");
      }
      have_header = true;
      continue;
    }
    const std::size_t expected = named ? 3 : 2;
    if (cells.size() != expected) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected) + " fields");
    }
    const std::string name = named ? cells[0] : "data";
    auto it = std::find_if(out.begin(), out.end(), [&](const XYDataset& d) { return d.name == name; });
    if (it == out.end()) {
      out.push_back({name, {}, {}});
      it = out.end() - 1;
    }
    it->x.push_back(parse_number(cells[expected - 2], line_no));
    it->y.push_back(parse_number(cells[expected - 1], line_no));
  }
  if (!have_header) throw InvalidArgument("no header row");
  return out;
}

}  // namespace silcert::diagnostics
