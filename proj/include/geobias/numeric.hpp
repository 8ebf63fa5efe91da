#pragma once

#include <span>
#include <vector>

namespace geobias::num {

double mean(std::span<const double> v);

// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double sample_sd(std::span<const double> v);

// Linear-interpolation quantile (R type 7): h = (n-1)q on the sorted values.
// q outside [0,1] throws ParameterError; empty input throws EmptyInputError.
double quantile_linear(std::vector<double> values, double q);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

double pearson(std::span<const double> a, std::span<const double> b);

// Ranks 1..n with ties assigned their average rank.
std::vector<double> ranks_average_ties(std::span<const double> v);

// Spearman rank correlation (average-tie ranks, Pearson on ranks).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace geobias::num
