#include "tordiff/quadrature.hpp"

#include <cmath>

#include "tordiff/angles.hpp"
#include "tordiff/errors.hpp"

namespace tordiff {

const double kGauss8Nodes[8] = {
    -0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
    -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
const double kGauss8Weights[8] = {
    0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
    0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    if (depth <= 0) throw NumericError("integrate_adaptive: recursion limit reached");
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, m, fm, lm, flm);
    double right = simpson(f, m, fm, b, fb, rm, frm);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    if (a == b) return 0.0;
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw NumericError("integrate_adaptive: non-finite interval");
    // seed with a fixed 16-panel split so narrow features are not missed
    const int n0 = 16;
    double h = (b - a) / n0;
    double sum = 0.0;
    for (int i = 0; i < n0; ++i) {
        double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        double f0 = f(x0), f1 = f(x1), fm = f(xm);
        double whole = simpson(f, x0, f0, x1, f1, xm, fm);
        sum += adaptive_step(f, x0, f0, x1, f1, xm, fm, whole, tol / n0, max_depth);
    }
    return sum;
}

PrefixIntegralTable::PrefixIntegralTable(MultiIntegrand eval, int n_integrands, int n_panels)
    : eval_(std::move(eval)), m_(n_integrands), n_panels_(n_panels), h_(two_pi / n_panels) {
    cumulative_.assign(static_cast<size_t>(n_panels_ + 1) * m_, 0.0);
    std::vector<double> vals(m_), acc(m_, 0.0);
    for (int p = 0; p < n_panels_; ++p) {
        double x0 = p * h_;
        std::vector<double> panel(m_, 0.0);
        for (int g = 0; g < 8; ++g) {
            double x = x0 + 0.5 * h_ * (1.0 + kGauss8Nodes[g]);
            eval_(x, vals);
            for (int j = 0; j < m_; ++j) panel[j] += kGauss8Weights[g] * vals[j];
        }
        for (int j = 0; j < m_; ++j) {
            acc[j] += 0.5 * h_ * panel[j];
            cumulative_[static_cast<size_t>(p + 1) * m_ + j] = acc[j];
        }
    }
    totals_ = acc;
}

void PrefixIntegralTable::prefix_all(double x, std::span<double> out) const {
    if (x <= 0.0) {
        for (int j = 0; j < m_; ++j) out[j] = 0.0;
        return;
    }
    if (x >= two_pi) {
        for (int j = 0; j < m_; ++j) out[j] = totals_[j];
        return;
    }
    int p = static_cast<int>(x / h_);
    if (p >= n_panels_) p = n_panels_ - 1;
    double x0 = p * h_;
    double w = x - x0;
    std::vector<double> vals(m_);
    for (int j = 0; j < m_; ++j) out[j] = cumulative_[static_cast<size_t>(p) * m_ + j];
    if (w > 0.0) {
        std::vector<double> partial(m_, 0.0);
        for (int g = 0; g < 8; ++g) {
            double xg = x0 + 0.5 * w * (1.0 + kGauss8Nodes[g]);
            eval_(xg, vals);
            for (int j = 0; j < m_; ++j) partial[j] += kGauss8Weights[g] * vals[j];
        }
        for (int j = 0; j < m_; ++j) out[j] += 0.5 * w * partial[j];
    }
}

double PrefixIntegralTable::prefix(int which, double x) const {
    std::vector<double> out(m_);
    prefix_all(x, out);
    return out[which];
}

std::vector<double> PrefixIntegralTable::knot_values(int which) const {
    std::vector<double> k(n_panels_ + 1);
    for (int p = 0; p <= n_panels_; ++p) k[p] = cumulative_[static_cast<size_t>(p) * m_ + which];
    return k;
}

}  // namespace tordiff
