#include "econet/regress.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "econet/errors.hpp"

namespace econet {

const std::vector<double>& DataTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return data[c];
  throw ValidationError("unknown column '" + name + "'");
}

void DataTable::add_column(const std::string& name, std::vector<double> values) {
  if (!data.empty() && values.size() != rows())
    throw ValidationError("column '" + name + "' has mismatched length");
  columns.push_back(name);
  data.push_back(std::move(values));
}

std::vector<double> standardize(const std::vector<double>& column) {
  const std::size_t n = column.size();
  if (n < 2) throw ValidationError("standardize: need at least 2 values");
  double mean = 0.0;
  for (double v : column) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : column) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw ValidationError("standardize: constant column");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (column[i] - mean) / sd;
  return out;
}

RegressionFit ols_fit(const DataTable& table, const RegressionSpec& spec) {
  if (spec.terms.empty()) throw ValidationError("regression needs terms");
  {
    std::vector<std::string> sorted = spec.terms;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("duplicate regression terms");
  }
  for (auto& [a, b] : spec.interactions) {
    auto has = [&](const std::string& t) {
      return std::find(spec.terms.begin(), spec.terms.end(), t) != spec.terms.end();
    };
    if (!has(a) || !has(b))
      throw ValidationError("interaction members must appear among terms");
  }

  const auto& y_raw = table.column(spec.response);
  std::vector<const std::vector<double>*> x_raw;
  for (auto& t : spec.terms) x_raw.push_back(&table.column(t));

  // complete cases
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool ok = std::isfinite(y_raw[r]);
    for (auto* col : x_raw) ok = ok && std::isfinite((*col)[r]);
    if (ok) keep.push_back(r);
  }
  RegressionFit fit;
  fit.n = static_cast<long>(keep.size());
  fit.dropped = static_cast<long>(table.rows() - keep.size());

  const int m = static_cast<int>(spec.terms.size());
  const int p = 1 + m + static_cast<int>(spec.interactions.size());
  if (fit.n <= p)
    throw ValidationError("not enough complete cases for the design");

  auto gather = [&](const std::vector<double>& col) {
    std::vector<double> v(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) v[r] = col[keep[r]];
    return v;
  };

  std::vector<double> y = gather(y_raw);
  std::vector<std::vector<double>> mains(m);
  for (int c = 0; c < m; ++c) mains[c] = gather(*x_raw[c]);
  if (spec.standardize) {
    y = standardize(y);
    for (auto& col : mains) col = standardize(col);
  }

  const long n = fit.n;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (long r = 0; r < n; ++r) {
    X(r, 0) = 1.0;
    Y(r) = y[r];
    for (int c = 0; c < m; ++c) X(r, 1 + c) = mains[c][r];
  }
  for (std::size_t q = 0; q < spec.interactions.size(); ++q) {
    auto find_term = [&](const std::string& t) {
      return static_cast<int>(std::find(spec.terms.begin(), spec.terms.end(), t) -
                              spec.terms.begin());
    };
    int a = find_term(spec.interactions[q].first);
    int b = find_term(spec.interactions[q].second);
    for (long r = 0; r < n; ++r)
      X(r, 1 + m + static_cast<int>(q)) = mains[a][r] * mains[b][r];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) throw NumericError("rank-deficient design matrix");
  Eigen::VectorXd beta = qr.solve(Y);
  Eigen::VectorXd resid = Y - X * beta;
  const double ssr = resid.squaredNorm();
  const double df = static_cast<double>(n - p);
  const double sigma2 = ssr / df;

  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  double y_mean = Y.mean();
  double sst = (Y.array() - y_mean).square().sum();
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

  boost::math::students_t tdist(df);
  auto push = [&](const std::string& name, int c) {
    Coefficient coef;
    coef.term = name;
    coef.estimate = beta(c);
    coef.se = std::sqrt(sigma2 * xtx_inv(c, c));
    if (coef.se > 0.0) {
      double t = coef.estimate / coef.se;
      coef.p_value = 2.0 * boost::math::cdf(tdist, -std::abs(t));
    } else {
      coef.p_value = coef.estimate == 0.0 ? 1.0 : 0.0;
    }
    fit.coefficients.push_back(coef);
  };
  push("(Intercept)", 0);
  for (int c = 0; c < m; ++c) push(spec.terms[c], 1 + c);
  for (std::size_t q = 0; q < spec.interactions.size(); ++q)
    push(spec.interactions[q].first + ":" + spec.interactions[q].second,
         1 + m + static_cast<int>(q));
  return fit;
}

RegressionFit interaction_fit(const DataTable& table, const RegressionSpec& spec) {
  if (spec.interactions.empty())
    throw ValidationError("interaction_fit needs at least one interaction");
  return ols_fit(table, spec);
}

}  // namespace econet
