#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tordiff/circular.hpp"
#include "tordiff/toroidal.hpp"

namespace tordiff {

/// A circular (p = 1) or toroidal diffusion with prescribed stationary
/// density and volatility. Owns the transform machinery (circular cdf /
/// Rosenblatt map) shared by simulation, transition densities and bridges.
class DiffusionModel {
  public:
    DiffusionModel(CircularDensity density, double sigma);
    DiffusionModel(ToroidalDensity density, CovarianceSpec covariance);

    int dimension() const { return p_; }
    bool is_circular() const { return p_ == 1 && circular_.has_value(); }

    const CircularDensity& circular_density() const { return *circular_; }
    const ToroidalDensity& toroidal_density() const { return *toroidal_; }
    double sigma() const;
    const CovarianceSpec& covariance() const { return *covariance_; }

    double stationary_pdf(std::span<const double> theta) const;
    double stationary_log_pdf(std::span<const double> theta) const;

    const CircularCdf& cdf() const { return *cdf_; }             // p = 1
    const RosenblattMap& rosenblatt() const { return *rosenblatt_; }  // p >= 2

    /// R(theta) for any p (p = 1 uses F).
    std::vector<double> transform(std::span<const double> theta) const;
    /// R^{-1}(y) for any p.
    std::vector<double> transform_inverse(std::span<const double> y) const;

  private:
    int p_;
    std::optional<CircularDensity> circular_;
    std::optional<ToroidalDensity> toroidal_;
    std::optional<CovarianceSpec> covariance_;
    std::shared_ptr<const CircularCdf> cdf_;
    std::shared_ptr<const RosenblattMap> rosenblatt_;
};

/// Discretely observed trajectory: spacing delta and an (n+1) x p matrix of
/// angles in [0, 2pi), row 0 being the initial state.
struct PathSample {
    double delta = 0.0;
    int dimension = 1;
    std::vector<double> angles;  // row-major (n+1) x dimension
    std::string label;

    std::size_t n_steps() const { return angles.size() / dimension - 1; }
    std::span<const double> state(std::size_t i) const {
        return {angles.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }
    double at(std::size_t i, int j = 0) const { return angles[i * dimension + j]; }

    /// CSV with header "t,theta1[,theta2,...]", radians, row 0 = theta0.
    void write_csv(std::ostream& os) const;
    static PathSample read_csv(std::istream& is);
};

/// Exact transition densities of the diffusion, in natural and log space.
class TransitionKernel {
  public:
    explicit TransitionKernel(DiffusionModel model);

    const DiffusionModel& model() const { return model_; }

    double log_tpd(std::span<const double> from, std::span<const double> to, double t) const;
    double tpd(std::span<const double> from, std::span<const double> to, double t) const;
    double log_tpd1(double from, double to, double t) const;  // circular shorthand
    double tpd1(double from, double to, double t) const;

    /// log tpd given the precomputed transform of the conditioning state;
    /// avoids re-evaluating R(from) inside quadrature loops.
    double log_tpd_from_transformed(std::span<const double> from_transformed,
                                    std::span<const double> to, double t) const;

  private:
    DiffusionModel model_;
};

struct SdeCoefficients {
    std::vector<double> drift;              // p
    std::vector<double> diffusion_matrix;   // p x p row-major
};

/// Published drift/diffusion of the SDE at theta. p = 1: drift
/// -sigma^2 f'/(2 f^3), diffusion sigma/f. Product densities: the diagonal
/// system. p = 2 non-product (isotropic Sigma = sigma^2 I): the
/// lower-triangular system with the h and b terms evaluated by central
/// finite differences of the conditional cdf (step 1e-5).
SdeCoefficients sde_coefficients(const DiffusionModel& model, std::span<const double> theta);

/// Same coefficients from the generic transform representation: drift_k =
/// tr[Sigma H(R_k^{-1})] / 2 and diffusion DR^{-1} Sigma^{1/2}, with the
/// Hessian of R^{-1} taken by finite differences. Reference implementation
/// for cross-checking the displayed p = 2 system.
SdeCoefficients sde_coefficients_generic(const DiffusionModel& model,
                                         std::span<const double> theta, double step = 1e-4);

struct SimulationResult {
    PathSample path;
    std::vector<double> transform_path;  // unwrapped transform-space states, (n+1) x p
};

/// Exact simulation: cumulate Gaussian increments in transform space and map
/// through F^{-1} / R^{-1}; no discretization bias.
SimulationResult simulate_exact(const DiffusionModel& model, std::span<const double> theta0,
                                std::size_t n, double delta, std::uint64_t seed);

/// Euler-Maruyama reference integrator over the published coefficients,
/// wrapping at each substep.
SimulationResult simulate_euler(const DiffusionModel& model, std::span<const double> theta0,
                                std::size_t n, double delta, int substeps, std::uint64_t seed);

/// log sum_{k in Z^p} phi_{t Sigma}(d + k), truncated at 6 marginal standard
/// deviations per coordinate and stabilized in log space.
double mv_wrapped_gauss_log_sum(std::span<const double> d, const CovarianceSpec& sigma,
                                double t);

}  // namespace tordiff
