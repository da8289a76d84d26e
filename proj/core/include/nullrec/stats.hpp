#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nullrec {

/// Pairwise (cascade) summation; deterministic given element order.
double pairwise_sum(std::span<const double> xs);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    double variance = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

/// Two-sample Kolmogorov-Smirnov distance sup|F1 - F2| (inputs copied, sorted).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// KS distance between the empirical law and the standard normal.
double ks_vs_standard_normal(std::vector<double> a);

double normal_cdf(double z);

/// Anderson-Darling A*^2 for composite normality (mean and variance estimated,
/// Stephens' small-sample adjustment). 1% critical value is 1.035.
double anderson_darling_normal(std::vector<double> a);
inline constexpr double kAndersonDarling1pct = 1.035;

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // OLS standard error of the slope
};

/// OLS fit of y against x.
SlopeFit linear_fit(std::span<const double> x, std::span<const double> y);

/// OLS fit of log(y) against log(x); all inputs must be positive.
SlopeFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Sorted marginal samples of a d-dimensional law at a fixed time.
struct EmpiricalLaw {
    std::vector<std::vector<double>> coordinates;  // each sorted ascending
    std::size_t sample_size = 0;

    static EmpiricalLaw from_samples(const std::vector<std::vector<double>>& rows, int dim);
};

}  // namespace nullrec
