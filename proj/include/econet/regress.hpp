#pragma once

#include <string>
#include <utility>
#include <vector>

namespace econet {

// Column store with aligned rows; missing values are NaN. keys carries the
// optional row identifier (e.g. neighborhood id).
struct DataTable {
  std::vector<std::string> keys;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major, data[c].size() == rows

  std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
  const std::vector<double>& column(const std::string& name) const;
  void add_column(const std::string& name, std::vector<double> values);
};

struct RegressionSpec {
  std::string response;
  std::vector<std::string> terms;
  std::vector<std::pair<std::string, std::string>> interactions;
  bool standardize = true;
};

struct Coefficient {
  std::string term;
  double estimate = 0;
  double se = 0;
  double p_value = 0;
};

struct RegressionFit {
  std::vector<Coefficient> coefficients;  // intercept first
  long n = 0;
  long dropped = 0;  // incomplete cases removed
  double r_squared = 0;
};

// subtract the sample mean, divide by the sample SD (divisor n-1)
std::vector<double> standardize(const std::vector<double>& column);

// OLS with an intercept. When spec.standardize is on, the response and every
// main-effect column are standardized first and interaction columns are
// products of the standardized mains. Classical homoskedastic SEs; two-sided
// p-values from t with n - p degrees of freedom.
RegressionFit ols_fit(const DataTable& table, const RegressionSpec& spec);

// ols_fit requiring at least one interaction term
RegressionFit interaction_fit(const DataTable& table, const RegressionSpec& spec);

}  // namespace econet
