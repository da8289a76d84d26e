#include "nullrec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nullrec {

namespace {
double pairwise_sum_impl(const double* xs, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(xs, half) + pairwise_sum_impl(xs + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum_impl(xs.data(), xs.size());
}

MeanSE mean_se(std::span<const double> xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    std::vector<double> dev2(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        const double d = xs[i] - r.mean;
        dev2[i] = d * d;
    }
    r.variance = pairwise_sum(dev2) / static_cast<double>(r.n - 1);
    r.se = std::sqrt(r.variance / static_cast<double>(r.n));
    return r;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_vs_standard_normal(std::vector<double> a) {
    if (a.empty()) throw std::invalid_argument("ks_vs_standard_normal: empty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = normal_cdf(a[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(f - lo), std::abs(f - hi)});
    }
    return d;
}

double anderson_darling_normal(std::vector<double> a) {
    const std::size_t n = a.size();
    if (n < 8) throw std::invalid_argument("anderson_darling_normal: need at least 8 samples");
    const MeanSE m = mean_se(a);
    const double sd = std::sqrt(m.variance);
    if (!(sd > 0.0)) return std::numeric_limits<double>::infinity();
    std::sort(a.begin(), a.end());
    double s = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = (a[i] - m.mean) / sd;
        const double zr = (a[n - 1 - i] - m.mean) / sd;
        // log CDF via erfc keeps the tails accurate.
        const double log_phi = std::log(std::max(normal_cdf(zi), 1e-300));
        const double log_one_minus = std::log(std::max(normal_cdf(-zr), 1e-300));
        s += (2.0 * static_cast<double>(i) + 1.0) * (log_phi + log_one_minus);
    }
    const double a2 = -dn - s / dn;
    return a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
}

SlopeFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2)
        throw std::invalid_argument("linear_fit: need matching samples, n >= 2");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("linear_fit: degenerate abscissae");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss_res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.slope_se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

SlopeFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw std::invalid_argument("loglog_fit: inputs must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly);
}

EmpiricalLaw EmpiricalLaw::from_samples(const std::vector<std::vector<double>>& rows, int dim) {
    EmpiricalLaw law;
    law.sample_size = rows.size();
    law.coordinates.assign(static_cast<std::size_t>(dim), {});
    for (auto& c : law.coordinates) c.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("EmpiricalLaw: row dimension mismatch");
        for (int j = 0; j < dim; ++j) law.coordinates[static_cast<std::size_t>(j)].push_back(row[static_cast<std::size_t>(j)]);
    }
    for (auto& c : law.coordinates) std::sort(c.begin(), c.end());
    return law;
}

}  // namespace nullrec
