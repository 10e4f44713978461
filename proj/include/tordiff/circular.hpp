#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tordiff/quadrature.hpp"
#include "tordiff/rng.hpp"

namespace tordiff {

enum class CircularFamily { uniform, von_mises, wrapped_cauchy, von_mises_mixture };

std::string family_name(CircularFamily f);
CircularFamily family_from_name(const std::string& name);

struct VonMisesComponent {
    double weight;
    double mu;
    double kappa;
};

/// A strictly positive 2pi-periodic parametric density on the circle with
/// analytic derivative and parameter gradient. The density is renormalized
/// internally, so a constructor-supplied constant factor (see with_scale)
/// never reaches callers.
class CircularDensity {
  public:
    static CircularDensity uniform();
    static CircularDensity von_mises(double mu, double kappa);
    static CircularDensity wrapped_cauchy(double mu, double rho);
    static CircularDensity von_mises_mixture(std::vector<VonMisesComponent> components);

    /// Same density with the unnormalized form multiplied by c > 0; the
    /// internal renormalization absorbs it, so all outputs are unchanged.
    CircularDensity with_scale(double c) const;

    CircularFamily family() const { return family_; }
    const std::vector<VonMisesComponent>& components() const { return components_; }

    double pdf(double theta) const;
    double log_pdf(double theta) const;
    double pdf_derivative(double theta) const;

    /// Natural parameter vector beta: () for uniform, (mu, kappa) for von
    /// Mises, (mu, rho) for wrapped Cauchy, (w_1..w_{m-1}, mu_1, kappa_1,
    /// ..., mu_m, kappa_m) for mixtures.
    int beta_dim() const;
    std::vector<double> beta() const;
    static CircularDensity from_beta(CircularFamily fam, std::span<const double> beta,
                                     int n_components = 0);

    /// d log f / d beta at theta; out.size() == beta_dim().
    void grad_log_pdf(double theta, std::span<double> out) const;
    /// f(theta) and d f / d beta in one pass (for shared quadrature sweeps).
    void pdf_and_beta_grad(double theta, double& f, std::span<double> df) const;

    /// Minimum of the pdf over a 1024-point grid; densities close to zero
    /// make the SDE coefficients blow up (the drift carries 1/f^3).
    double min_pdf_on_grid() const;
    bool low_density_warning() const { return min_pdf_on_grid() < 1e-6; }

    /// Suggested panel count for quadrature tables, scaled to the sharpest
    /// feature of the family.
    int suggested_panels() const;

    static CircularDensity from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;

  private:
    CircularDensity() = default;
    double raw_pdf(double theta) const;  // unnormalized form times scale_
    CircularFamily family_ = CircularFamily::uniform;
    double mu_ = 0.0;
    double concentration_ = 0.0;  // kappa (vM) or rho (WC)
    std::vector<VonMisesComponent> components_;
    std::vector<double> comp_norm_;  // 1 / (2 pi I0(kappa_j)) per component
    double scale_ = 1.0;
    double norm_ = 1.0;  // integral of raw_pdf over one period
};

/// Circular cumulative distribution function of a density, extended to all
/// of R by F(x) = F(x mod 2pi) + floor(x / (2pi)), with inverse honoring
/// F^{-1}(y) = F^{-1}(y mod 1) + 2pi floor(y). Closed forms for the uniform
/// and wrapped Cauchy families, a panel quadrature table otherwise. An
/// optional monotone cubic interpolation cache (512 knots, verified to
/// 1e-9 at construction) accelerates repeated inversion.
struct CdfOptions {
    bool inversion_cache = true;
    int panels = 0;      // 0 = choose from the density's suggestion
    bool verify = true;  // cross-check the panel table against adaptive quadrature
};

class CircularCdf {
  public:
    explicit CircularCdf(CircularDensity density, CdfOptions options = CdfOptions{});
    /// Generic strictly positive 2pi-periodic density, normalized internally.
    explicit CircularCdf(std::function<double(double)> pdf, CdfOptions options = CdfOptions{});

    const CircularDensity* density() const { return density_ ? &*density_ : nullptr; }

    double cdf(double x) const;
    double inverse(double y) const;
    double pdf(double theta) const;  // the normalized density F' in [0, 2pi)

    double sample(RngStream& rng) const { return inverse(rng.uniform()); }
    std::vector<double> sample_stationary(std::size_t n, RngStream& rng) const;

  private:
    void build(CdfOptions options);
    double cdf_base(double theta) const;  // on [0, 2pi]
    double invert_base(double y) const;   // y in [0, 1) -> [0, 2pi)

    std::optional<CircularDensity> density_;
    std::function<double(double)> pdf_fn_;
    std::unique_ptr<PrefixIntegralTable> table_;
    double total_ = 1.0;
    // inversion cache: F and f at uniform knots, monotone Hermite inverse
    bool has_cache_ = false;
    std::vector<double> knot_cdf_;
    std::vector<double> knot_pdf_;
    double knot_h_ = 0.0;
    bool closed_form_ = false;
};

}  // namespace tordiff
