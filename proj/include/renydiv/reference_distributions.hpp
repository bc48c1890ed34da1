#pragma once

namespace renydiv {

double normal_cdf(double x);
// Upper tail P(Z > x), accurate far into the tail.
double normal_sf(double x);
double normal_quantile(double prob);
// Two-sided critical value z with P(|Z| <= z) = level.
double two_sided_critical(double level);
// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

}  // namespace renydiv
