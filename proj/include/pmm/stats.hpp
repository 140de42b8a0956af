#pragma once
// Just enough statistics for the audit harness: chi-square tail
// probabilities through the regularized incomplete gamma function.

#include <cstddef>
#include <vector>

namespace pmm {

// regularized upper incomplete gamma Q(a, x), a > 0, x >= 0
double gamma_q(double a, double x);

// P(X >= stat) for X ~ chi-square with dof degrees of freedom
double chi_square_tail(double stat, std::size_t dof);

// one-sample test against equal expected counts; returns the p-value
double chi_square_uniform_pvalue(const std::vector<std::size_t>& counts);

// two-sample test that both count vectors draw from one distribution;
// cells where both samples are empty are skipped
double chi_square_two_sample_pvalue(const std::vector<std::size_t>& a,
                                    const std::vector<std::size_t>& b);

}  // namespace pmm
