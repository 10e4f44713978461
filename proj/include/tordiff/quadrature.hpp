#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tordiff {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
/// Throws NumericError if the recursion limit is hit before convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-10, int max_depth = 48);

/// Evaluates m integrands at once; out has size m.
using MultiIntegrand = std::function<void(double x, std::span<double> out)>;

/// Prefix integrals of m smooth integrands over [0, 2pi] on a uniform panel
/// grid, one Gauss-Legendre 8-point rule per panel. prefix(j, x) returns
/// \int_0^x integrand_j by combining stored panel sums with an 8-point rule
/// on the trailing partial panel, which for smooth integrands is accurate to
/// machine precision. Shared panels keep all m integrals mutually consistent.
class PrefixIntegralTable {
  public:
    PrefixIntegralTable(MultiIntegrand eval, int n_integrands, int n_panels);

    double prefix(int which, double x) const;  // requires x in [0, 2pi]
    void prefix_all(double x, std::span<double> out) const;
    double total(int which) const { return totals_[which]; }
    int panels() const { return n_panels_; }

    /// Panel-boundary prefix values of integrand `which` (size n_panels + 1).
    std::vector<double> knot_values(int which) const;

  private:
    MultiIntegrand eval_;
    int m_;
    int n_panels_;
    double h_;
    std::vector<double> cumulative_;  // (n_panels + 1) x m, row-major
    std::vector<double> totals_;
};

/// 8-point Gauss-Legendre nodes/weights on [-1, 1].
extern const double kGauss8Nodes[8];
extern const double kGauss8Weights[8];

}  // namespace tordiff
