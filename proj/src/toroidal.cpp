#include "tordiff/toroidal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tordiff/angles.hpp"
#include "tordiff/errors.hpp"
#include "tordiff/special.hpp"

namespace tordiff {

namespace {

double kappa_2lambda(const BvMParams& b, double theta1) {
    return std::hypot(b.kappa2, b.lambda * std::sin(theta1 - b.mu1));
}

double mu_2lambda(const BvMParams& b, double theta1) {
    return b.mu2 + std::atan2(b.lambda * std::sin(theta1 - b.mu1), b.kappa2);
}

double bvm_exponent(const BvMParams& b, double t1, double t2) {
    return b.kappa1 * std::cos(t1 - b.mu1) + b.kappa2 * std::cos(t2 - b.mu2) +
           b.lambda * std::sin(t1 - b.mu1) * std::sin(t2 - b.mu2);
}

}  // namespace

ToroidalDensity ToroidalDensity::product(std::vector<CircularDensity> factors) {
    if (factors.empty()) throw std::invalid_argument("product: needs at least one factor");
    ToroidalDensity d;
    d.structure_ = ToroidalFamily::product;
    d.factors_ = std::move(factors);
    return d;
}

ToroidalDensity ToroidalDensity::bivariate_von_mises(const BvMParams& params) {
    ToroidalDensity d;
    d.structure_ = ToroidalFamily::bivariate_von_mises;
    d.components_ = {{1.0, params}};
    d.norm_constants_ = {
        bvm_normalizing_constant({params.kappa1, params.kappa2, params.lambda})};
    return d;
}

ToroidalDensity ToroidalDensity::bvm_mixture(std::vector<BvMComponent> components) {
    if (components.empty()) throw std::invalid_argument("bvm_mixture: no components");
    double wsum = 0.0;
    for (const auto& c : components) {
        if (!(c.weight >= 0.0)) throw std::invalid_argument("bvm_mixture: negative weight");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("bvm_mixture: weights must sum to 1");
    ToroidalDensity d;
    d.structure_ = ToroidalFamily::bvm_mixture;
    d.components_ = std::move(components);
    for (const auto& c : d.components_)
        d.norm_constants_.push_back(
            bvm_normalizing_constant({c.params.kappa1, c.params.kappa2, c.params.lambda}));
    return d;
}

ToroidalDensity ToroidalDensity::blended_with_uniform(double alpha) const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("blended_with_uniform: alpha must be in [0, 1]");
    if (structure_ == ToroidalFamily::product)
        throw std::invalid_argument(
            "blended_with_uniform: supported for bivariate von Mises densities only");
    std::vector<BvMComponent> comps;
    for (const auto& c : components_) comps.push_back({(1.0 - alpha) * c.weight, c.params});
    comps.push_back({alpha, BvMParams{0.0, 0.0, 0.0, 0.0, 0.0}});  // uniform on T^2
    return bvm_mixture(std::move(comps));
}

int ToroidalDensity::dimension() const {
    return structure_ == ToroidalFamily::product ? static_cast<int>(factors_.size()) : 2;
}

double ToroidalDensity::pdf(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != dimension())
        throw std::invalid_argument("toroidal pdf: dimension mismatch");
    if (structure_ == ToroidalFamily::product) {
        double f = 1.0;
        for (std::size_t j = 0; j < factors_.size(); ++j) f *= factors_[j].pdf(theta[j]);
        return f;
    }
    double f = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j)
        f += components_[j].weight * norm_constants_[j] *
             std::exp(bvm_exponent(components_[j].params, theta[0], theta[1]));
    return f;
}

double ToroidalDensity::log_pdf(std::span<const double> theta) const {
    return std::log(pdf(theta));
}

double ToroidalDensity::marginal1_pdf(double theta) const {
    if (structure_ == ToroidalFamily::product) return factors_[0].pdf(theta);
    double f = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& b = components_[j].params;
        f += components_[j].weight * norm_constants_[j] * two_pi *
             bessel_i(0, kappa_2lambda(b, theta)) * std::exp(b.kappa1 * std::cos(theta - b.mu1));
    }
    return f;
}

double ToroidalDensity::conditional_pdf(int level, double x,
                                        std::span<const double> given) const {
    if (level < 1 || level > dimension())
        throw std::invalid_argument("conditional_pdf: level out of range");
    if (structure_ == ToroidalFamily::product) return factors_[level - 1].pdf(x);
    if (level == 1) return marginal1_pdf(x);
    return conditional_density(level, given).pdf(x);
}

CircularDensity ToroidalDensity::conditional_density(int level,
                                                     std::span<const double> given) const {
    if (level < 1 || level > dimension())
        throw std::invalid_argument("conditional_density: level out of range");
    if (structure_ == ToroidalFamily::product) return factors_[level - 1];
    if (level == 1)
        throw std::invalid_argument(
            "conditional_density: the bivariate von Mises marginal is not a standard family; "
            "use marginal1_pdf");
    const double t1 = given[0];
    if (components_.size() == 1) {
        const auto& b = components_[0].params;
        return CircularDensity::von_mises(mu_2lambda(b, t1), kappa_2lambda(b, t1));
    }
    // mixture of conditionals with theta1-dependent weights w_j f_{1,j}(t1) / sum
    std::vector<VonMisesComponent> comps(components_.size());
    double total = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& b = components_[j].params;
        double w = components_[j].weight * norm_constants_[j] * two_pi *
                   bessel_i(0, kappa_2lambda(b, t1)) * std::exp(b.kappa1 * std::cos(t1 - b.mu1));
        comps[j] = {w, mu_2lambda(b, t1), kappa_2lambda(b, t1)};
        total += w;
    }
    for (auto& c : comps) c.weight /= total;
    double drift = 0.0;
    for (const auto& c : comps) drift += c.weight;
    comps.back().weight += 1.0 - drift;
    return CircularDensity::von_mises_mixture(std::move(comps));
}

ToroidalDensity ToroidalDensity::from_json(const nlohmann::json& spec) {
    const auto fam = spec.at("family").get<std::string>();
    ToroidalDensity d = [&] {
        if (fam == "product") {
            std::vector<CircularDensity> factors;
            for (const auto& f : spec.at("factors"))
                factors.push_back(CircularDensity::from_json(f));
            return product(std::move(factors));
        }
        if (fam == "bvm") {
            BvMParams b{spec.at("mu1").get<double>(), spec.at("mu2").get<double>(),
                        spec.at("kappa1").get<double>(), spec.at("kappa2").get<double>(),
                        spec.at("lambda").get<double>()};
            return bivariate_von_mises(b);
        }
        if (fam == "bvm_mixture") {
            std::vector<BvMComponent> comps;
            for (const auto& c : spec.at("components")) {
                BvMParams b{c.at("mu1").get<double>(), c.at("mu2").get<double>(),
                            c.at("kappa1").get<double>(), c.at("kappa2").get<double>(),
                            c.at("lambda").get<double>()};
                comps.push_back({c.at("w").get<double>(), b});
            }
            return bvm_mixture(std::move(comps));
        }
        throw std::invalid_argument("unknown toroidal family: " + fam);
    }();
    if (spec.contains("alpha")) d = d.blended_with_uniform(spec.at("alpha").get<double>());
    return d;
}

nlohmann::json ToroidalDensity::to_json() const {
    nlohmann::json j;
    switch (structure_) {
        case ToroidalFamily::product: {
            j["family"] = "product";
            nlohmann::json factors = nlohmann::json::array();
            for (const auto& f : factors_) factors.push_back(f.to_json());
            j["factors"] = factors;
            break;
        }
        case ToroidalFamily::bivariate_von_mises: {
            const auto& b = components_[0].params;
            j = {{"family", "bvm"},    {"mu1", b.mu1},       {"mu2", b.mu2},
                 {"kappa1", b.kappa1}, {"kappa2", b.kappa2}, {"lambda", b.lambda}};
            break;
        }
        case ToroidalFamily::bvm_mixture: {
            j["family"] = "bvm_mixture";
            nlohmann::json comps = nlohmann::json::array();
            for (const auto& c : components_)
                comps.push_back({{"w", c.weight},
                                 {"mu1", c.params.mu1},
                                 {"mu2", c.params.mu2},
                                 {"kappa1", c.params.kappa1},
                                 {"kappa2", c.params.kappa2},
                                 {"lambda", c.params.lambda}});
            j["components"] = comps;
            break;
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// CovarianceSpec
// ---------------------------------------------------------------------------

CovarianceSpec CovarianceSpec::isotropic(int p, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("CovarianceSpec: sigma must be positive");
    std::vector<double> m(static_cast<size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) m[static_cast<size_t>(i) * p + i] = sigma * sigma;
    return CovarianceSpec(p, std::move(m));
}

CovarianceSpec CovarianceSpec::diagonal(std::vector<double> sigmas) {
    const int p = static_cast<int>(sigmas.size());
    std::vector<double> m(static_cast<size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) {
        if (!(sigmas[i] > 0.0))
            throw std::invalid_argument("CovarianceSpec: sigmas must be positive");
        m[static_cast<size_t>(i) * p + i] = sigmas[i] * sigmas[i];
    }
    return CovarianceSpec(p, std::move(m));
}

CovarianceSpec::CovarianceSpec(int p, std::vector<double> sigma_matrix)
    : p_(p), sigma_(std::move(sigma_matrix)) {
    if (static_cast<int>(sigma_.size()) != p * p)
        throw std::invalid_argument("CovarianceSpec: matrix size mismatch");
    double scale = 0.0;
    for (double v : sigma_) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(entry(i, j) - entry(j, i)) > 1e-12 * std::max(scale, 1.0))
                throw std::invalid_argument("CovarianceSpec: matrix not symmetric");
    chol_.assign(sigma_.size(), 0.0);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = entry(i, j);
            for (int k = 0; k < j; ++k) s -= chol_entry(i, k) * chol_entry(j, k);
            if (i == j) {
                if (!(s > 0.0))
                    throw std::invalid_argument("CovarianceSpec: matrix not positive-definite");
                chol_[static_cast<size_t>(i) * p + j] = std::sqrt(s);
            } else {
                chol_[static_cast<size_t>(i) * p + j] = s / chol_entry(j, j);
            }
        }
    }
}

void CovarianceSpec::apply_sqrt(std::span<const double> z, std::span<double> out) const {
    for (int i = 0; i < p_; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += chol_entry(i, j) * z[j];
        out[i] = s;
    }
}

void CovarianceSpec::solve_sqrt(std::span<const double> v, std::span<double> out) const {
    for (int i = 0; i < p_; ++i) {
        double s = v[i];
        for (int j = 0; j < i; ++j) s -= chol_entry(i, j) * out[j];
        out[i] = s / chol_entry(i, i);
    }
}

double CovarianceSpec::log_det_cholesky() const {
    double s = 0.0;
    for (int i = 0; i < p_; ++i) s += std::log(chol_entry(i, i));
    return s;
}

// ---------------------------------------------------------------------------
// RosenblattMap
// ---------------------------------------------------------------------------

RosenblattMap::RosenblattMap(ToroidalDensity density) : density_(std::move(density)) {
    if (density_.structure() == ToroidalFamily::product) {
        for (const auto& f : density_.factors())
            product_levels_.push_back(std::make_shared<const CircularCdf>(f));
        level1_ = product_levels_[0];
    } else {
        // hold the density by value inside the callable so the cdf object
        // stays valid if the map is moved
        ToroidalDensity d = density_;
        level1_ = std::make_shared<const CircularCdf>(
            [d](double t) { return d.marginal1_pdf(t); }, CdfOptions{});
    }
}

CircularCdf RosenblattMap::conditional_slice(int level, std::span<const double> given) const {
    if (level < 2 || level > dimension())
        throw std::invalid_argument("conditional_slice: level out of range");
    CdfOptions fast{.inversion_cache = false, .panels = 0, .verify = false};
    return CircularCdf(density_.conditional_density(level, given), fast);
}

void RosenblattMap::forward(std::span<const double> x, std::span<double> y) const {
    const int p = dimension();
    std::vector<double> wrapped(p);
    for (int j = 0; j < p; ++j) wrapped[j] = wrap_angle(x[j]);
    y[0] = level1_->cdf(x[0]);
    for (int j = 2; j <= p; ++j) {
        if (density_.structure() == ToroidalFamily::product) {
            y[j - 1] = product_levels_[j - 1]->cdf(x[j - 1]);
        } else {
            auto slice = conditional_slice(j, std::span<const double>(wrapped).first(j - 1));
            y[j - 1] = slice.cdf(x[j - 1]);
        }
    }
}

void RosenblattMap::inverse(std::span<const double> y, std::span<double> x) const {
    const int p = dimension();
    std::vector<double> wrapped(p);
    x[0] = level1_->inverse(y[0]);
    wrapped[0] = wrap_angle(x[0]);
    for (int j = 2; j <= p; ++j) {
        if (density_.structure() == ToroidalFamily::product) {
            x[j - 1] = product_levels_[j - 1]->inverse(y[j - 1]);
        } else {
            auto slice = conditional_slice(j, std::span<const double>(wrapped).first(j - 1));
            x[j - 1] = slice.inverse(y[j - 1]);
        }
        wrapped[j - 1] = wrap_angle(x[j - 1]);
    }
}

std::vector<double> RosenblattMap::forward(std::span<const double> x) const {
    std::vector<double> y(dimension());
    forward(x, y);
    return y;
}

std::vector<double> RosenblattMap::inverse_vec(std::span<const double> y) const {
    std::vector<double> x(dimension());
    inverse(y, x);
    return x;
}

}  // namespace tordiff
