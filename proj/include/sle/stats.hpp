#pragma once

#include <cstdint>
#include <vector>

namespace sle {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(const std::vector<double>& w);

/// Two-sample Kolmogorov-Smirnov distance between weighted empirical CDFs.
/// Empty weight vectors mean unit weights. Zero-weight points are ignored.
double ks_statistic(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& wa = {}, const std::vector<double>& wb = {});

/// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double x);

/// Asymptotic p-value with Stephens' small-sample correction for effective
/// sample sizes n1, n2.
double ks_asymptotic_pvalue(double d, double n1, double n2);

struct TwoSampleResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double n_eff1 = 0.0;
    double n_eff2 = 0.0;
    bool weighted = false;
    /// "permutation" or "asymptotic".
    const char* method = "";
};

/// Unweighted test with a permutation p-value (1 + #{D* >= D}) / (1 + B).
TwoSampleResult ks_permutation_test(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t permutations, std::uint64_t seed);

/// Weighted test; the p-value uses Kish effective sample sizes in the
/// asymptotic Kolmogorov law.
TwoSampleResult ks_weighted_test(const std::vector<double>& a, const std::vector<double>& wa,
                                 const std::vector<double>& b, const std::vector<double>& wb);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Goodness of fit of counts against expected probabilities.
ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts, const std::vector<double>& probs);

}  // namespace sle
