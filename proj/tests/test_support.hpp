#pragma once

#include <cstdint>
#include <map>
#include <vector>

// shared helpers for the test binaries: tolerances, simple statistics, and
// a chi-square tail for the distribution-equality checks

namespace nbc::testing {

bool close(double a, double b, double rtol, double atol = 0.0);

struct Moments {
    double mean = 0.0;
    double stderr_mean = 0.0;
    int64_t count = 0;
};
Moments moments(const std::vector<double>& xs);

// upper regularized incomplete gamma Q(a, x) = P[Chi2_{2a} > 2x]
double gamma_q(double a, double x);

// survival function of the chi-square distribution
double chi2_sf(double statistic, int dof);

// two-sample chi-square homogeneity test over identically-binned counts;
// bins where both samples are empty are dropped
double chi2_two_sample_pvalue(const std::map<int64_t, int64_t>& counts_a,
                              const std::map<int64_t, int64_t>& counts_b);

}  // namespace nbc::testing
