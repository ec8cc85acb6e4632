#include "mds/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mds {

double median_row_lag1_autocorr(const MatrixF& x) {
  std::vector<double> rs;
  rs.reserve(static_cast<std::size_t>(x.rows()));
  for (Index f = 0; f < x.rows(); ++f) {
    const VectorD row = x.row(f).cast<double>();
    const Index t = row.size();
    if (t < 2) continue;
    const double mu = row.mean();
    const VectorD c = row.array() - mu;
    const double var = c.squaredNorm();
    if (var <= 0.0) continue;
    const double cov = (c.head(t - 1).array() * c.tail(t - 1).array()).sum();
    rs.push_back(cov / var);
  }
  if (rs.empty()) return 0.0;
  const auto mid = rs.begin() + static_cast<std::ptrdiff_t>(rs.size() / 2);
  std::nth_element(rs.begin(), mid, rs.end());
  double m = *mid;
  if (rs.size() % 2 == 0) {
    const double lower = *std::max_element(rs.begin(), mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

double excess_kurtosis(const MatrixF& x) {
  const double mu = field_mean(x);
  const Eigen::ArrayXXd c = x.cast<double>().array() - mu;
  const double m2 = c.square().mean();
  if (m2 <= 0.0) return 0.0;
  const double m4 = c.square().square().mean();
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace mds
