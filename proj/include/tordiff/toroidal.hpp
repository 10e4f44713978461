#pragma once

#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "tordiff/circular.hpp"

namespace tordiff {

enum class ToroidalFamily { product, bivariate_von_mises, bvm_mixture };

/// Sine bivariate von Mises parameters.
struct BvMParams {
    double mu1, mu2;
    double kappa1, kappa2;
    double lambda;
};

struct BvMComponent {
    double weight;
    BvMParams params;
};

/// Strictly positive density on the p-torus with a conditional decomposition
/// f(x) = f_1(x_1) f_2(x_2 | x_1) ... f_p(x_p | x_1..x_{p-1}). Non-product
/// families are bivariate (p = 2); products support any p.
class ToroidalDensity {
  public:
    static ToroidalDensity product(std::vector<CircularDensity> factors);
    static ToroidalDensity bivariate_von_mises(const BvMParams& params);
    static ToroidalDensity bvm_mixture(std::vector<BvMComponent> components);

    /// (1 - alpha) f + alpha / (2pi)^p, as an extra uniform mixture
    /// component. Supported for the bivariate von Mises families.
    ToroidalDensity blended_with_uniform(double alpha) const;

    ToroidalFamily structure() const { return structure_; }
    int dimension() const;

    double pdf(std::span<const double> theta) const;
    double log_pdf(std::span<const double> theta) const;

    /// f_j(x | x_1..x_{j-1}); level is 1-based and `given` holds the first
    /// level-1 coordinates.
    double conditional_pdf(int level, double x, std::span<const double> given) const;

    /// The level-j conditional as a circular density object (level >= 2 for
    /// the bivariate families, any level for products).
    CircularDensity conditional_density(int level, std::span<const double> given) const;

    /// First-coordinate marginal; for the bivariate von Mises this is
    /// 2 pi C I_0(kappa_2lambda(theta)) exp(kappa_1 cos(theta - mu_1)).
    double marginal1_pdf(double theta) const;

    const std::vector<CircularDensity>& factors() const { return factors_; }
    const std::vector<BvMComponent>& components() const { return components_; }

    static ToroidalDensity from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;

  private:
    ToroidalDensity() = default;
    ToroidalFamily structure_ = ToroidalFamily::product;
    std::vector<CircularDensity> factors_;    // product case
    std::vector<BvMComponent> components_;    // BvM cases (single = one component)
    std::vector<double> norm_constants_;      // C(kappa1, kappa2, lambda) per component
};

/// p x p SPD diffusion covariance with its lower-triangular Cholesky factor.
class CovarianceSpec {
  public:
    static CovarianceSpec isotropic(int p, double sigma);
    static CovarianceSpec diagonal(std::vector<double> sigmas);
    /// Row-major dense symmetric positive-definite matrix.
    explicit CovarianceSpec(int p, std::vector<double> sigma_matrix);

    int dim() const { return p_; }
    double entry(int i, int j) const { return sigma_[static_cast<size_t>(i) * p_ + j]; }
    const std::vector<double>& matrix() const { return sigma_; }
    const std::vector<double>& cholesky() const { return chol_; }
    double chol_entry(int i, int j) const { return chol_[static_cast<size_t>(i) * p_ + j]; }

    /// out = L z
    void apply_sqrt(std::span<const double> z, std::span<double> out) const;
    /// out = L^{-1} v
    void solve_sqrt(std::span<const double> v, std::span<double> out) const;
    double log_det_cholesky() const;

  private:
    int p_ = 0;
    std::vector<double> sigma_;
    std::vector<double> chol_;
};

/// The Rosenblatt transform R(x) = (F_1(x_1), F_2(x_2|x_1), ...)', a
/// bijection of R^p satisfying R(x) = R(x mod 2pi) + floor(x/(2pi)) and
/// R^{-1}(y) = R^{-1}(y mod 1) + 2pi floor(y), with |DR(x)| = f(x).
class RosenblattMap {
  public:
    explicit RosenblattMap(ToroidalDensity density);

    int dimension() const { return density_.dimension(); }
    const ToroidalDensity& density() const { return density_; }

    void forward(std::span<const double> x, std::span<double> y) const;
    void inverse(std::span<const double> y, std::span<double> x) const;
    std::vector<double> forward(std::span<const double> x) const;
    std::vector<double> inverse_vec(std::span<const double> y) const;

    /// Conditional cdf slice F_level(. | given); cheap to evaluate many times
    /// at one `given`. Level 1 ignores `given`.
    const CircularCdf& level1() const { return *level1_; }
    CircularCdf conditional_slice(int level, std::span<const double> given) const;

  private:
    ToroidalDensity density_;
    std::shared_ptr<const CircularCdf> level1_;
    std::vector<std::shared_ptr<const CircularCdf>> product_levels_;  // product fast path
};

}  // namespace tordiff
