#include "pmm/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pmm {

namespace {

// series expansion of P(a, x), converges fast for x < a + 1
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a, x), converges fast for x >= a + 1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_tail(double stat, std::size_t dof) {
    if (dof == 0) return 1.0;
    return gamma_q(double(dof) / 2.0, stat / 2.0);
}

double chi_square_uniform_pvalue(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (counts.size() < 2 || total == 0) return 1.0;
    double expected = double(total) / double(counts.size());
    double stat = 0.0;
    for (std::size_t c : counts) {
        double d = double(c) - expected;
        stat += d * d / expected;
    }
    return chi_square_tail(stat, counts.size() - 1);
}

double chi_square_two_sample_pvalue(const std::vector<std::size_t>& a,
                                    const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cell counts differ in length");
    double na = 0, nb = 0;
    for (std::size_t c : a) na += double(c);
    for (std::size_t c : b) nb += double(c);
    if (na == 0 || nb == 0) return 1.0;
    // standard two-sample statistic with scaling for unequal sample sizes
    double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double ca = double(a[i]), cb = double(b[i]);
        if (ca + cb == 0) continue;
        double d = ka * ca - kb * cb;
        stat += d * d / (ca + cb);
        ++cells;
    }
    if (cells < 2) return 1.0;
    return chi_square_tail(stat, cells - 1);
}

}  // namespace pmm
