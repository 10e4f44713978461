#include "tordiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tordiff/angles.hpp"
#include "tordiff/errors.hpp"
#include "tordiff/rng.hpp"
#include "tordiff/special.hpp"

namespace tordiff {

namespace {
constexpr double kDensityFloor = 1e-8;
}

DiffusionModel::DiffusionModel(CircularDensity density, double sigma)
    : p_(1), circular_(std::move(density)) {
    if (!(sigma > 0.0)) throw std::invalid_argument("DiffusionModel: sigma must be positive");
    covariance_ = CovarianceSpec::isotropic(1, sigma);
    cdf_ = std::make_shared<const CircularCdf>(*circular_);
}

DiffusionModel::DiffusionModel(ToroidalDensity density, CovarianceSpec covariance)
    : p_(density.dimension()), toroidal_(std::move(density)), covariance_(std::move(covariance)) {
    if (covariance_->dim() != p_)
        throw std::invalid_argument("DiffusionModel: covariance dimension mismatch");
    rosenblatt_ = std::make_shared<const RosenblattMap>(*toroidal_);
}

double DiffusionModel::sigma() const {
    if (!is_circular()) throw std::logic_error("sigma(): not a circular model");
    return std::sqrt(covariance_->entry(0, 0));
}

double DiffusionModel::stationary_pdf(std::span<const double> theta) const {
    return is_circular() ? circular_->pdf(theta[0]) : toroidal_->pdf(theta);
}

double DiffusionModel::stationary_log_pdf(std::span<const double> theta) const {
    return std::log(stationary_pdf(theta));
}

std::vector<double> DiffusionModel::transform(std::span<const double> theta) const {
    if (is_circular()) return {cdf_->cdf(theta[0])};
    return rosenblatt_->forward(theta);
}

std::vector<double> DiffusionModel::transform_inverse(std::span<const double> y) const {
    if (is_circular()) return {cdf_->inverse(y[0])};
    return rosenblatt_->inverse_vec(y);
}

// ---------------------------------------------------------------------------
// PathSample CSV
// ---------------------------------------------------------------------------

void PathSample::write_csv(std::ostream& os) const {
    os << "t";
    for (int j = 1; j <= dimension; ++j) os << ",theta" << j;
    os << "\n";
    char buf[32];
    const std::size_t rows = angles.size() / dimension;
    for (std::size_t i = 0; i < rows; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", i * delta);
        os << buf;
        for (int j = 0; j < dimension; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", at(i, j));
            os << ',' << buf;
        }
        os << "\n";
    }
}

PathSample PathSample::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("path csv: empty input");
    int dim = 0;
    {
        std::stringstream hs(line);
        std::string col;
        bool first = true;
        while (std::getline(hs, col, ',')) {
            if (first) {
                if (col != "t") throw std::invalid_argument("path csv: first column must be t");
                first = false;
            } else {
                ++dim;
            }
        }
    }
    if (dim < 1) throw std::invalid_argument("path csv: no angle columns");
    PathSample p;
    p.dimension = dim;
    std::vector<double> times;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            double v = std::stod(cell);
            if (col == 0)
                times.push_back(v);
            else
                p.angles.push_back(v);
            ++col;
        }
        if (col != dim + 1) throw std::invalid_argument("path csv: ragged row");
    }
    if (times.size() < 1) throw std::invalid_argument("path csv: no rows");
    p.delta = times.size() > 1 ? times[1] - times[0] : 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        double gap = times[i] - times[i - 1];
        if (std::abs(gap - p.delta) > 1e-9 * std::max(1.0, std::abs(p.delta)))
            throw std::invalid_argument("path csv: non-uniform time grid");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Transition density
// ---------------------------------------------------------------------------

double mv_wrapped_gauss_log_sum(std::span<const double> d, const CovarianceSpec& sigma,
                                double t) {
    const int p = sigma.dim();
    const double sqrt_t = std::sqrt(t);
    std::vector<int> radius(p);
    for (int i = 0; i < p; ++i)
        radius[i] = static_cast<int>(std::ceil(6.0 * std::sqrt(t * sigma.entry(i, i)))) + 1;
    const double log_norm = -0.5 * p * std::log(two_pi) - sigma.log_det_cholesky() -
                            0.5 * p * std::log(t);
    std::vector<double> shifted(p), solved(p);
    std::vector<int> k(p, 0);
    for (int i = 0; i < p; ++i) k[i] = -radius[i];
    std::vector<double> logs;
    double max_log = -std::numeric_limits<double>::infinity();
    for (;;) {
        for (int i = 0; i < p; ++i) shifted[i] = d[i] + k[i];
        sigma.solve_sqrt(shifted, solved);
        double q = 0.0;
        for (int i = 0; i < p; ++i) q += solved[i] * solved[i];
        double l = log_norm - 0.5 * q / t;
        logs.push_back(l);
        max_log = std::max(max_log, l);
        int axis = 0;
        while (axis < p && ++k[axis] > radius[axis]) {
            k[axis] = -radius[axis];
            ++axis;
        }
        if (axis == p) break;
    }
    double s = 0.0;
    for (double l : logs) s += std::exp(l - max_log);
    return max_log + std::log(s);
}

TransitionKernel::TransitionKernel(DiffusionModel model) : model_(std::move(model)) {}

double TransitionKernel::log_tpd(std::span<const double> from, std::span<const double> to,
                                 double t) const {
    auto y1 = model_.transform(from);
    return log_tpd_from_transformed(y1, to, t);
}

double TransitionKernel::log_tpd_from_transformed(std::span<const double> from_transformed,
                                                  std::span<const double> to, double t) const {
    if (!(t > 0.0)) throw std::domain_error("transition_density: elapsed time must be positive");
    if (model_.is_circular()) {
        const double v = model_.sigma() * model_.sigma() * t;
        const double x = model_.cdf().cdf(to[0]) - from_transformed[0];
        auto m = wrapped_gauss_moments(x, v);
        return model_.circular_density().log_pdf(to[0]) + m.log_s0;
    }
    auto y2 = model_.transform(to);
    std::vector<double> d(y2.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = y2[i] - from_transformed[i];
    return model_.stationary_log_pdf(to) + mv_wrapped_gauss_log_sum(d, model_.covariance(), t);
}

double TransitionKernel::tpd(std::span<const double> from, std::span<const double> to,
                             double t) const {
    return std::exp(log_tpd(from, to, t));
}

double TransitionKernel::log_tpd1(double from, double to, double t) const {
    std::array<double, 1> a{from}, b{to};
    return log_tpd(a, b, t);
}

double TransitionKernel::tpd1(double from, double to, double t) const {
    return std::exp(log_tpd1(from, to, t));
}

// ---------------------------------------------------------------------------
// SDE coefficients
// ---------------------------------------------------------------------------

namespace {

void check_density_floor(double f) {
    if (f < kDensityFloor)
        throw NumericError("sde_coefficients: stationary density below positivity floor");
}

bool is_isotropic(const CovarianceSpec& s) {
    const int p = s.dim();
    const double d0 = s.entry(0, 0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double want = i == j ? d0 : 0.0;
            if (std::abs(s.entry(i, j) - want) > 1e-12 * std::max(1.0, d0)) return false;
        }
    return true;
}

}  // namespace

SdeCoefficients sde_coefficients(const DiffusionModel& model, std::span<const double> theta) {
    const int p = model.dimension();
    SdeCoefficients out;
    out.drift.assign(p, 0.0);
    out.diffusion_matrix.assign(static_cast<std::size_t>(p) * p, 0.0);
    if (model.is_circular()) {
        const auto& d = model.circular_density();
        const double f = d.pdf(theta[0]);
        check_density_floor(f);
        const double s = model.sigma();
        out.drift[0] = -s * s * d.pdf_derivative(theta[0]) / (2.0 * f * f * f);
        out.diffusion_matrix[0] = s / f;
        return out;
    }
    const auto& td = model.toroidal_density();
    const auto& cov = model.covariance();
    if (td.structure() == ToroidalFamily::product) {
        // diagonal transform: drift_j = -Sigma_jj f_j'/(2 f_j^3), diffusion
        // diag(1/f_j) Sigma^{1/2}
        std::vector<double> f(p);
        for (int j = 0; j < p; ++j) {
            const auto& fac = td.factors()[j];
            f[j] = fac.pdf(theta[j]);
            check_density_floor(f[j]);
            out.drift[j] =
                -cov.entry(j, j) * fac.pdf_derivative(theta[j]) / (2.0 * f[j] * f[j] * f[j]);
        }
        for (int i = 0; i < p; ++i)
            for (int j = 0; j <= i; ++j)
                out.diffusion_matrix[static_cast<std::size_t>(i) * p + j] =
                    cov.chol_entry(i, j) / f[i];
        return out;
    }
    if (p != 2 || !is_isotropic(cov))
        throw std::invalid_argument(
            "sde_coefficients: non-product densities require p = 2 and isotropic covariance; "
            "use sde_coefficients_generic otherwise");
    const double sigma = std::sqrt(cov.entry(0, 0));
    const double t1 = theta[0], t2 = theta[1];
    const auto& R = model.rosenblatt();
    std::array<double, 1> given{wrap_angle(t1)};
    auto cond = td.conditional_density(2, given);
    const double f1 = td.marginal1_pdf(t1);
    const double f2 = cond.pdf(t2);
    const double fj = td.pdf(theta);
    check_density_floor(f1);
    check_density_floor(f2);
    check_density_floor(fj);

    const double hstep = 1e-5;
    auto f1p = [&](double x) { return td.marginal1_pdf(x); };
    const double f1_prime = (f1p(t1 + hstep) - f1p(t1 - hstep)) / (2.0 * hstep);
    const double f2_prime = cond.pdf_derivative(t2);

    // h(x1, x2) = d_{x1} F2(x2 | x1) / f(x1, x2), partials by central
    // differences of the conditional cdf over the conditioning variable
    auto F2_at = [&](double x1, double x2) {
        std::array<double, 1> g{wrap_angle(x1)};
        return R.conditional_slice(2, g).cdf(x2);
    };
    auto h_at = [&](double x1, double x2) {
        double dF = (F2_at(x1 + hstep, x2) - F2_at(x1 - hstep, x2)) / (2.0 * hstep);
        std::array<double, 2> th{x1, x2};
        return dF / td.pdf(th);
    };
    const double h = h_at(t1, t2);
    const double dstep = 1e-4;
    const double dh_dx1 = (h_at(t1 + dstep, t2) - h_at(t1 - dstep, t2)) / (2.0 * dstep);
    const double dh_dx2 = (h_at(t1, t2 + dstep) - h_at(t1, t2 - dstep)) / (2.0 * dstep);
    const double b = dh_dx1 / f1 - dh_dx2 * h;

    out.drift[0] = -0.5 * sigma * sigma * f1_prime / (f1 * f1 * f1);
    out.drift[1] = -0.5 * sigma * sigma * (f2_prime / (f2 * f2 * f2) + b);
    out.diffusion_matrix[0] = sigma / f1;
    out.diffusion_matrix[1] = 0.0;
    out.diffusion_matrix[2] = -sigma * h;
    out.diffusion_matrix[3] = sigma / f2;
    return out;
}

SdeCoefficients sde_coefficients_generic(const DiffusionModel& model,
                                         std::span<const double> theta, double step) {
    const int p = model.dimension();
    const auto& cov = model.covariance();
    auto y0 = model.transform(theta);
    auto rinv = [&](std::span<const double> y) { return model.transform_inverse(y); };

    SdeCoefficients out;
    out.drift.assign(p, 0.0);
    out.diffusion_matrix.assign(static_cast<std::size_t>(p) * p, 0.0);

    // Jacobian D R^{-1} by central differences
    std::vector<std::vector<double>> jac(p, std::vector<double>(p));
    for (int j = 0; j < p; ++j) {
        auto yp = y0, ym = y0;
        yp[j] += step;
        ym[j] -= step;
        auto xp = rinv(yp), xm = rinv(ym);
        for (int i = 0; i < p; ++i) jac[i][j] = (xp[i] - xm[i]) / (2.0 * step);
    }
    // diffusion = (D R^{-1}) Sigma^{1/2}
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += jac[i][k] * cov.chol_entry(k, j);
            out.diffusion_matrix[static_cast<std::size_t>(i) * p + j] = s;
        }

    // drift_k = tr[Sigma H(R_k^{-1})] / 2 with Hessians by central differences
    auto x_center = rinv(y0);
    for (int k = 0; k < p; ++k) {
        double tr = 0.0;
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                if (cov.entry(i, j) == 0.0) continue;
                double hess;
                if (i == j) {
                    auto yp = y0, ym = y0;
                    yp[i] += step;
                    ym[i] -= step;
                    hess = (rinv(yp)[k] - 2.0 * x_center[k] + rinv(ym)[k]) / (step * step);
                } else {
                    auto ypp = y0, ypm = y0, ymp = y0, ymm = y0;
                    ypp[i] += step;
                    ypp[j] += step;
                    ypm[i] += step;
                    ypm[j] -= step;
                    ymp[i] -= step;
                    ymp[j] += step;
                    ymm[i] -= step;
                    ymm[j] -= step;
                    hess = (rinv(ypp)[k] - rinv(ypm)[k] - rinv(ymp)[k] + rinv(ymm)[k]) /
                           (4.0 * step * step);
                }
                tr += cov.entry(i, j) * hess;
            }
        }
        out.drift[k] = 0.5 * tr;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace {

PathSample make_path(int p, double delta, std::size_t n) {
    PathSample path;
    path.dimension = p;
    path.delta = delta;
    path.angles.reserve((n + 1) * p);
    return path;
}

}  // namespace

SimulationResult simulate_exact(const DiffusionModel& model, std::span<const double> theta0,
                                std::size_t n, double delta, std::uint64_t seed) {
    const int p = model.dimension();
    if (static_cast<int>(theta0.size()) != p)
        throw std::invalid_argument("simulate_exact: theta0 dimension mismatch");
    if (!(delta > 0.0)) throw std::invalid_argument("simulate_exact: delta must be positive");
    RngStream rng(seed);
    SimulationResult result;
    result.path = make_path(p, delta, n);
    auto u = model.transform(theta0);
    for (int j = 0; j < p; ++j) result.path.angles.push_back(wrap_angle(theta0[j]));
    result.transform_path = u;
    const double sqrt_dt = std::sqrt(delta);
    std::vector<double> z(p), dz(p), y(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.normal();
        model.covariance().apply_sqrt(z, dz);
        for (int j = 0; j < p; ++j) {
            u[j] += sqrt_dt * dz[j];
            y[j] = wrap_unit(u[j]);
        }
        auto theta = model.transform_inverse(y);
        for (int j = 0; j < p; ++j) result.path.angles.push_back(wrap_angle(theta[j]));
        result.transform_path.insert(result.transform_path.end(), u.begin(), u.end());
    }
    return result;
}

SimulationResult simulate_euler(const DiffusionModel& model, std::span<const double> theta0,
                                std::size_t n, double delta, int substeps, std::uint64_t seed) {
    const int p = model.dimension();
    if (substeps < 1) throw std::invalid_argument("simulate_euler: substeps must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("simulate_euler: delta must be positive");
    RngStream rng(seed);
    SimulationResult result;
    result.path = make_path(p, delta, n);
    std::vector<double> x(theta0.begin(), theta0.end());
    for (int j = 0; j < p; ++j) {
        x[j] = wrap_angle(x[j]);
        result.path.angles.push_back(x[j]);
    }
    const double dt = delta / substeps;
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> z(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = 0; s < substeps; ++s) {
            auto coef = sde_coefficients(model, x);
            for (int j = 0; j < p; ++j) z[j] = rng.normal();
            for (int j = 0; j < p; ++j) {
                double dW = 0.0;
                for (int k = 0; k < p; ++k)
                    dW += coef.diffusion_matrix[static_cast<std::size_t>(j) * p + k] * z[k];
                x[j] = wrap_angle(x[j] + coef.drift[j] * dt + sqrt_dt * dW);
            }
        }
        for (int j = 0; j < p; ++j) result.path.angles.push_back(x[j]);
    }
    return result;
}

}  // namespace tordiff
