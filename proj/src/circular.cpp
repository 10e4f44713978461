#include "tordiff/circular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tordiff/angles.hpp"
#include "tordiff/errors.hpp"
#include "tordiff/special.hpp"

namespace tordiff {

std::string family_name(CircularFamily f) {
    switch (f) {
        case CircularFamily::uniform: return "uniform";
        case CircularFamily::von_mises: return "von_mises";
        case CircularFamily::wrapped_cauchy: return "wrapped_cauchy";
        case CircularFamily::von_mises_mixture: return "von_mises_mixture";
    }
    return "?";
}

CircularFamily family_from_name(const std::string& name) {
    if (name == "uniform") return CircularFamily::uniform;
    if (name == "von_mises") return CircularFamily::von_mises;
    if (name == "wrapped_cauchy") return CircularFamily::wrapped_cauchy;
    if (name == "von_mises_mixture") return CircularFamily::von_mises_mixture;
    throw std::invalid_argument("unknown circular family: " + name);
}

namespace {
int next_pow2(double x) {
    int n = 1;
    while (n < x && n < (1 << 14)) n <<= 1;
    return n;
}
}  // namespace

CircularDensity CircularDensity::uniform() {
    CircularDensity d;
    d.family_ = CircularFamily::uniform;
    d.norm_ = two_pi;
    return d;
}

CircularDensity CircularDensity::von_mises(double mu, double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("von_mises: kappa must be >= 0");
    CircularDensity d;
    d.family_ = CircularFamily::von_mises;
    d.mu_ = wrap_angle(mu);
    d.concentration_ = kappa;
    d.norm_ = two_pi * bessel_i(0, kappa);
    return d;
}

CircularDensity CircularDensity::wrapped_cauchy(double mu, double rho) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("wrapped_cauchy: rho must be in [0, 1)");
    CircularDensity d;
    d.family_ = CircularFamily::wrapped_cauchy;
    d.mu_ = wrap_angle(mu);
    d.concentration_ = rho;
    d.norm_ = two_pi;
    return d;
}

CircularDensity CircularDensity::von_mises_mixture(std::vector<VonMisesComponent> components) {
    if (components.empty()) throw std::invalid_argument("mixture: needs at least one component");
    double wsum = 0.0;
    for (auto& c : components) {
        if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture: weights must be >= 0");
        if (!(c.kappa >= 0.0)) throw std::invalid_argument("mixture: kappa must be >= 0");
        c.mu = wrap_angle(c.mu);
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1");
    CircularDensity d;
    d.family_ = CircularFamily::von_mises_mixture;
    d.components_ = std::move(components);
    for (const auto& c : d.components_)
        d.comp_norm_.push_back(1.0 / (two_pi * bessel_i(0, c.kappa)));
    d.norm_ = 1.0;  // components are individually normalized
    return d;
}

CircularDensity CircularDensity::with_scale(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("with_scale: factor must be positive");
    CircularDensity d = *this;
    d.scale_ *= c;
    d.norm_ *= c;
    return d;
}

double CircularDensity::raw_pdf(double theta) const {
    switch (family_) {
        case CircularFamily::uniform: return scale_;
        case CircularFamily::von_mises:
            return scale_ * std::exp(concentration_ * std::cos(theta - mu_));
        case CircularFamily::wrapped_cauchy: {
            const double r = concentration_;
            const double denom = 1.0 + r * r - 2.0 * r * std::cos(theta - mu_);
            return scale_ * (1.0 - r * r) / denom;
        }
        case CircularFamily::von_mises_mixture: {
            double s = 0.0;
            for (std::size_t j = 0; j < components_.size(); ++j) {
                const auto& c = components_[j];
                s += c.weight * comp_norm_[j] * std::exp(c.kappa * std::cos(theta - c.mu));
            }
            return scale_ * s;
        }
    }
    return 0.0;
}

double CircularDensity::pdf(double theta) const {
    return raw_pdf(theta) / norm_;
}

double CircularDensity::log_pdf(double theta) const {
    return std::log(pdf(theta));
}

double CircularDensity::pdf_derivative(double theta) const {
    switch (family_) {
        case CircularFamily::uniform: return 0.0;
        case CircularFamily::von_mises:
            return -concentration_ * std::sin(theta - mu_) * pdf(theta);
        case CircularFamily::wrapped_cauchy: {
            const double r = concentration_;
            const double denom = 1.0 + r * r - 2.0 * r * std::cos(theta - mu_);
            return -pdf(theta) * 2.0 * r * std::sin(theta - mu_) / denom;
        }
        case CircularFamily::von_mises_mixture: {
            double s = 0.0;
            for (std::size_t j = 0; j < components_.size(); ++j) {
                const auto& c = components_[j];
                double fj = comp_norm_[j] * std::exp(c.kappa * std::cos(theta - c.mu));
                s += c.weight * (-c.kappa * std::sin(theta - c.mu)) * fj;
            }
            return s;
        }
    }
    return 0.0;
}

int CircularDensity::beta_dim() const {
    switch (family_) {
        case CircularFamily::uniform: return 0;
        case CircularFamily::von_mises:
        case CircularFamily::wrapped_cauchy: return 2;
        case CircularFamily::von_mises_mixture:
            return 3 * static_cast<int>(components_.size()) - 1;
    }
    return 0;
}

std::vector<double> CircularDensity::beta() const {
    switch (family_) {
        case CircularFamily::uniform: return {};
        case CircularFamily::von_mises:
        case CircularFamily::wrapped_cauchy: return {mu_, concentration_};
        case CircularFamily::von_mises_mixture: {
            std::vector<double> b;
            for (std::size_t j = 0; j + 1 < components_.size(); ++j)
                b.push_back(components_[j].weight);
            for (const auto& c : components_) {
                b.push_back(c.mu);
                b.push_back(c.kappa);
            }
            return b;
        }
    }
    return {};
}

CircularDensity CircularDensity::from_beta(CircularFamily fam, std::span<const double> beta,
                                           int n_components) {
    switch (fam) {
        case CircularFamily::uniform: return uniform();
        case CircularFamily::von_mises: return von_mises(beta[0], beta[1]);
        case CircularFamily::wrapped_cauchy: return wrapped_cauchy(beta[0], beta[1]);
        case CircularFamily::von_mises_mixture: {
            int m = n_components > 0 ? n_components : static_cast<int>((beta.size() + 1) / 3);
            std::vector<VonMisesComponent> comps(m);
            double wsum = 0.0;
            for (int j = 0; j + 1 < m; ++j) {
                comps[j].weight = beta[j];
                wsum += beta[j];
            }
            comps[m - 1].weight = 1.0 - wsum;
            for (int j = 0; j < m; ++j) {
                comps[j].mu = beta[m - 1 + 2 * j];
                comps[j].kappa = beta[m - 1 + 2 * j + 1];
            }
            return von_mises_mixture(std::move(comps));
        }
    }
    throw std::invalid_argument("from_beta: bad family");
}

void CircularDensity::grad_log_pdf(double theta, std::span<double> out) const {
    double f;
    pdf_and_beta_grad(theta, f, out);
    for (auto& g : out) g /= f;
}

void CircularDensity::pdf_and_beta_grad(double theta, double& f, std::span<double> df) const {
    switch (family_) {
        case CircularFamily::uniform:
            f = 1.0 / two_pi;
            return;
        case CircularFamily::von_mises: {
            f = pdf(theta);
            df[0] = concentration_ * std::sin(theta - mu_) * f;
            df[1] = (std::cos(theta - mu_) - bessel_i_ratio(concentration_)) * f;
            return;
        }
        case CircularFamily::wrapped_cauchy: {
            const double r = concentration_;
            const double denom = 1.0 + r * r - 2.0 * r * std::cos(theta - mu_);
            f = pdf(theta);
            df[0] = 2.0 * r * std::sin(theta - mu_) / denom * f;
            df[1] = (-2.0 * r / (1.0 - r * r) - (2.0 * r - 2.0 * std::cos(theta - mu_)) / denom) * f;
            return;
        }
        case CircularFamily::von_mises_mixture: {
            const int m = static_cast<int>(components_.size());
            std::vector<double> g(m);
            f = 0.0;
            for (int j = 0; j < m; ++j) {
                const auto& c = components_[j];
                g[j] = comp_norm_[j] * std::exp(c.kappa * std::cos(theta - c.mu));
                f += c.weight * g[j];
            }
            for (int j = 0; j + 1 < m; ++j) df[j] = g[j] - g[m - 1];
            for (int j = 0; j < m; ++j) {
                const auto& c = components_[j];
                df[m - 1 + 2 * j] = c.weight * c.kappa * std::sin(theta - c.mu) * g[j];
                df[m - 1 + 2 * j + 1] =
                    c.weight * (std::cos(theta - c.mu) - bessel_i_ratio(c.kappa)) * g[j];
            }
            return;
        }
    }
}

double CircularDensity::min_pdf_on_grid() const {
    double m = pdf(0.0);
    for (int i = 1; i < 1024; ++i) m = std::min(m, pdf(i * two_pi / 1024.0));
    return m;
}

int CircularDensity::suggested_panels() const {
    switch (family_) {
        case CircularFamily::uniform: return 64;
        case CircularFamily::von_mises:
            return std::max(256, next_pow2(256.0 * std::sqrt(std::max(1.0, concentration_ / 64.0))));
        case CircularFamily::wrapped_cauchy:
            return std::max(256, next_pow2(8.0 * pi / (1.0 - concentration_)));
        case CircularFamily::von_mises_mixture: {
            double kmax = 0.0;
            for (const auto& c : components_) kmax = std::max(kmax, c.kappa);
            return std::max(256, next_pow2(256.0 * std::sqrt(std::max(1.0, kmax / 64.0))));
        }
    }
    return 256;
}

CircularDensity CircularDensity::from_json(const nlohmann::json& spec) {
    const auto fam = family_from_name(spec.at("family").get<std::string>());
    switch (fam) {
        case CircularFamily::uniform: return uniform();
        case CircularFamily::von_mises:
            return von_mises(spec.at("mu").get<double>(), spec.at("kappa").get<double>());
        case CircularFamily::wrapped_cauchy:
            return wrapped_cauchy(spec.at("mu").get<double>(), spec.at("rho").get<double>());
        case CircularFamily::von_mises_mixture: {
            std::vector<VonMisesComponent> comps;
            for (const auto& c : spec.at("components"))
                comps.push_back({c.at("w").get<double>(), c.at("mu").get<double>(),
                                 c.at("kappa").get<double>()});
            return von_mises_mixture(std::move(comps));
        }
    }
    throw std::invalid_argument("from_json: bad family");
}

nlohmann::json CircularDensity::to_json() const {
    nlohmann::json j;
    j["family"] = family_name(family_);
    switch (family_) {
        case CircularFamily::uniform: break;
        case CircularFamily::von_mises:
            j["mu"] = mu_;
            j["kappa"] = concentration_;
            break;
        case CircularFamily::wrapped_cauchy:
            j["mu"] = mu_;
            j["rho"] = concentration_;
            break;
        case CircularFamily::von_mises_mixture: {
            nlohmann::json comps = nlohmann::json::array();
            for (const auto& c : components_)
                comps.push_back({{"w", c.weight}, {"mu", c.mu}, {"kappa", c.kappa}});
            j["components"] = comps;
            break;
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// CircularCdf
// ---------------------------------------------------------------------------

namespace {

// Antiderivative of the standard wrapped Cauchy centered at 0, extended to R:
// Phi(u + 2 pi k) = k + Phi(u), Phi(u) = 1/2 + atan(c tan(u/2)) / pi on
// [-pi, pi) with c = (1+rho)/(1-rho).
double wc_antiderivative(double x, double rho) {
    const double c = (1.0 + rho) / (1.0 - rho);
    double k = std::floor((x + pi) / two_pi);
    double u = x - two_pi * k;  // in [-pi, pi)
    return k + 0.5 + std::atan(c * std::tan(0.5 * u)) / pi;
}

double wc_antiderivative_inverse(double w, double rho) {
    const double c = (1.0 + rho) / (1.0 - rho);
    double k = std::floor(w);
    double frac = w - k;  // in [0, 1)
    double u = 2.0 * std::atan(std::tan(pi * (frac - 0.5)) / c);
    return u + two_pi * k;
}

}  // namespace

CircularCdf::CircularCdf(CircularDensity density, CdfOptions options)
    : density_(std::move(density)) {
    build(options);
}

CircularCdf::CircularCdf(std::function<double(double)> pdf, CdfOptions options)
    : pdf_fn_(std::move(pdf)) {
    if (options.panels == 0) options.panels = 256;
    build(options);
}

void CircularCdf::build(CdfOptions options) {
    closed_form_ = density_ && (density_->family() == CircularFamily::uniform ||
                                density_->family() == CircularFamily::wrapped_cauchy);
    if (closed_form_) return;
    int panels = options.panels;
    if (panels == 0) panels = density_ ? density_->suggested_panels() : 256;
    if (options.inversion_cache) panels = std::max(panels, 512);
    auto eval = [this](double x, std::span<double> out) { out[0] = pdf(x); };
    if (options.verify) {
        // double the grid until the table total agrees with an independent
        // adaptive quadrature
        const double ref =
            integrate_adaptive([this](double x) { return pdf(x); }, 0.0, two_pi, 1e-12);
        for (;;) {
            table_ = std::make_unique<PrefixIntegralTable>(eval, 1, panels);
            if (std::abs(table_->total(0) - ref) <= 1e-11 * std::abs(ref) || panels >= 16384)
                break;
            panels *= 2;
        }
    } else {
        table_ = std::make_unique<PrefixIntegralTable>(eval, 1, panels);
    }
    total_ = table_->total(0);
    knot_cdf_ = table_->knot_values(0);
    for (auto& v : knot_cdf_) v /= total_;
    const int n = static_cast<int>(knot_cdf_.size()) - 1;
    knot_h_ = two_pi / n;
    if (options.inversion_cache) {
        knot_pdf_.resize(n + 1);
        for (int i = 0; i <= n; ++i) knot_pdf_[i] = pdf(i * knot_h_) / total_;
        has_cache_ = true;
        // verify the monotone Hermite interpolant at panel midpoints
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double xm = (i + 0.5) * knot_h_;
            double t = 0.5;
            double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
            double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
            double hermite = h00 * knot_cdf_[i] + h10 * knot_h_ * knot_pdf_[i] +
                             h01 * knot_cdf_[i + 1] + h11 * knot_h_ * knot_pdf_[i + 1];
            worst = std::max(worst, std::abs(hermite - cdf_base(xm)));
        }
        if (worst > 1e-9) has_cache_ = false;
    }
}

double CircularCdf::pdf(double theta) const {
    if (density_) return density_->pdf(theta);
    return pdf_fn_(wrap_angle(theta));
}

double CircularCdf::cdf_base(double theta) const {
    if (closed_form_) {
        if (density_->family() == CircularFamily::uniform) return theta / two_pi;
        const auto beta = density_->beta();
        const double mu = beta[0], rho = beta[1];
        return wc_antiderivative(theta - mu, rho) - wc_antiderivative(-mu, rho);
    }
    return table_->prefix(0, theta) / total_;
}

double CircularCdf::cdf(double x) const {
    double k = std::floor(x / two_pi);
    double r = x - two_pi * k;
    if (r < 0.0) r = 0.0;
    if (r > two_pi) r = two_pi;
    return cdf_base(r) + k;
}

double CircularCdf::invert_base(double y) const {
    if (closed_form_) {
        if (density_->family() == CircularFamily::uniform) return y * two_pi;
        const auto beta = density_->beta();
        const double mu = beta[0], rho = beta[1];
        double x = wc_antiderivative_inverse(y + wc_antiderivative(-mu, rho), rho) + mu;
        return wrap_angle(x);
    }
    // bracket from the table knots
    auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), y);
    int i = std::clamp(static_cast<int>(it - knot_cdf_.begin()) - 1, 0,
                       static_cast<int>(knot_cdf_.size()) - 2);
    double lo = i * knot_h_;
    double hi = lo + knot_h_;
    double t = std::clamp(
        (y - knot_cdf_[i]) / std::max(knot_cdf_[i + 1] - knot_cdf_[i], 1e-300), 0.0, 1.0);
    if (has_cache_) {
        // invert the monotone Hermite cubic for the initial guess (no pdf calls)
        for (int it2 = 0; it2 < 8; ++it2) {
            double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
            double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
            double val = h00 * knot_cdf_[i] + h10 * knot_h_ * knot_pdf_[i] +
                         h01 * knot_cdf_[i + 1] + h11 * knot_h_ * knot_pdf_[i + 1] - y;
            double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
            double d01 = 6 * t - 6 * t * t, d11 = 3 * t * t - 2 * t;
            double dval = (d00 * knot_cdf_[i] + d01 * knot_cdf_[i + 1]) / knot_h_ +
                          d10 * knot_pdf_[i] + d11 * knot_pdf_[i + 1];
            dval *= knot_h_;
            if (dval <= 0.0) break;
            double tn = std::clamp(t - val / dval, 0.0, 1.0);
            if (std::abs(tn - t) < 1e-14) {
                t = tn;
                break;
            }
            t = tn;
        }
    }
    double x = lo + t * knot_h_;
    // safeguarded Newton on the true cdf
    double fer = cdf_base(x) - y;
    for (int iter = 0; iter < 100; ++iter) {
        if (std::abs(fer) < 1e-12) return x;
        if (fer > 0.0)
            hi = x;
        else
            lo = x;
        double d = pdf(x) / total_;
        double xn = (d > 0.0 && iter < 50) ? x - fer / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        fer = cdf_base(x) - y;
        if (hi - lo < 1e-15) return x;
    }
    throw NumericError("CircularCdf::inverse: root find did not converge");
}

double CircularCdf::inverse(double y) const {
    double k = std::floor(y);
    double frac = y - k;
    return invert_base(frac) + two_pi * k;
}

std::vector<double> CircularCdf::sample_stationary(std::size_t n, RngStream& rng) const {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
    return out;
}

}  // namespace tordiff
