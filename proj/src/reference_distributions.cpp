#include "renydiv/reference_distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "renydiv/errors.hpp"

namespace renydiv {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("normal quantile needs prob in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

double two_sided_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  return normal_quantile(0.5 + 0.5 * level);
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-square needs positive degrees of freedom");
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

}  // namespace renydiv
