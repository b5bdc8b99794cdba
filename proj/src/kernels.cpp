#include "nlwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nlwave/errors.hpp"
#include "nlwave/numerics.hpp"

namespace nlwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-10;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("kernel parameter ") + what +
                                    " must be finite and positive");
    }
}

void check_domain(const Kernel& k, double lambda) {
    if (!(std::abs(lambda) < k.lambda_hat())) {
        std::ostringstream msg;
        msg << "exponential moment of " << k.describe() << " requested at lambda = " << lambda
            << ", outside (-lambda_hat, lambda_hat) with lambda_hat = " << k.lambda_hat();
        throw DomainError(msg.str());
    }
}

// Derivative of order `order` (0, 1, 2) of the even entire series
// sum_k c_k x^{2k}, where c_0 is given and c_k = c_{k-1} * ratio(k).
template <class Ratio>
double even_series(double x, int order, double c0, Ratio ratio) {
    const double x2 = x * x;
    double c = c0;
    double sum = (order == 0) ? c0 : 0.0;
    double q = 1.0;  // x^{2k-2}
    for (int k = 1; k < 600; ++k) {
        c *= ratio(k);
        double term = 0.0;
        const double two_k = 2.0 * k;
        switch (order) {
            case 0:
                term = c * q * x2;
                break;
            case 1:
                term = two_k * c * x * q;
                break;
            default:
                term = two_k * (two_k - 1.0) * c * q;
                break;
        }
        sum += term;
        q *= x2;
        if (k > 2 && std::abs(term) <= 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

double uniform_moment(double support, double lambda, int order) {
    const double x = lambda * support;
    const double scale = std::pow(support, order);
    if (std::abs(x) < 4.0) {
        return scale * even_series(x, order, 1.0,
                                   [](int k) { return 1.0 / ((2.0 * k) * (2.0 * k + 1.0)); });
    }
    const double sh = std::sinh(x);
    const double ch = std::cosh(x);
    switch (order) {
        case 0:
            return sh / x;
        case 1:
            return scale * (ch / x - sh / (x * x));
        default:
            return scale * (sh / x - 2.0 * ch / (x * x) + 2.0 * sh / (x * x * x));
    }
}

double triangular_moment(double support, double lambda, int order) {
    const double x = lambda * support;
    const double scale = std::pow(support, order);
    if (std::abs(x) < 4.0) {
        return scale * even_series(x, order, 1.0,
                                   [](int k) { return 1.0 / ((2.0 * k + 1.0) * (2.0 * k + 2.0)); });
    }
    const double sh = std::sinh(x);
    const double chm1 = std::cosh(x) - 1.0;
    const double x2 = x * x;
    switch (order) {
        case 0:
            return 2.0 * chm1 / x2;
        case 1:
            return scale * (2.0 * sh / x2 - 4.0 * chm1 / (x2 * x));
        default:
            return scale * (2.0 * (chm1 + 1.0) / x2 - 8.0 * sh / (x2 * x) + 12.0 * chm1 / (x2 * x2));
    }
}

// erf(a) + erf(b) for b >= a, accurate when a is very negative.
double erf_sum(double a, double b) {
    if (a >= 0.0) {
        return std::erf(a) + std::erf(b);
    }
    return std::erfc(-a) - std::erfc(b);
}

double gaussian_tail_radius(double sigma) {
    // two-sided tail mass erfc(R / (sigma sqrt 2)) = 1e-10
    return numerics::bisect(
        [&](double r) { return std::erfc(r / (sigma * std::numbers::sqrt2)) - kTailMass; },
        0.0, 40.0 * sigma, 1e-14);
}

}  // namespace

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Uniform:
            return "uniform";
        case KernelFamily::Triangular:
            return "triangular";
        case KernelFamily::TruncatedGaussian:
            return "truncated_gaussian";
        case KernelFamily::Laplace:
            return "laplace";
        case KernelFamily::Gaussian:
            return "gaussian";
        case KernelFamily::Tabulated:
            return "tabulated";
    }
    return "unknown";
}

Kernel Kernel::uniform(double support) {
    require_positive(support, "S");
    Kernel k;
    k.family_ = KernelFamily::Uniform;
    k.support_ = support;
    k.lambda_hat_ = kInf;
    return k;
}

Kernel Kernel::triangular(double support) {
    require_positive(support, "S");
    Kernel k;
    k.family_ = KernelFamily::Triangular;
    k.support_ = support;
    k.lambda_hat_ = kInf;
    return k;
}

Kernel Kernel::truncated_gaussian(double sigma, double support) {
    require_positive(sigma, "sigma");
    require_positive(support, "S");
    Kernel k;
    k.family_ = KernelFamily::TruncatedGaussian;
    k.sigma_ = sigma;
    k.support_ = support;
    k.norm_ = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) *
                     std::erf(support / (sigma * std::numbers::sqrt2)));
    k.lambda_hat_ = kInf;
    return k;
}

Kernel Kernel::laplace(double alpha) {
    require_positive(alpha, "alpha");
    Kernel k;
    k.family_ = KernelFamily::Laplace;
    k.alpha_ = alpha;
    k.lambda_hat_ = alpha;
    return k;
}

Kernel Kernel::gaussian(double sigma) {
    require_positive(sigma, "sigma");
    Kernel k;
    k.family_ = KernelFamily::Gaussian;
    k.sigma_ = sigma;
    k.lambda_hat_ = kInf;
    return k;
}

Kernel Kernel::tabulated(std::vector<double> y, std::vector<double> values, double lambda_hat) {
    if (y.size() != values.size() || y.size() < 3) {
        throw std::invalid_argument("tabulated kernel needs at least 3 (y, J) pairs");
    }
    if (!(lambda_hat > 0.0)) {
        throw std::invalid_argument("tabulated kernel: lambda_hat must be positive (or inf)");
    }
    const std::size_t n = y.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (!(y[i] > y[i - 1])) {
            throw std::invalid_argument("tabulated kernel: abscissae must be strictly increasing");
        }
    }
    const double extent = std::max(std::abs(y.front()), std::abs(y.back()));
    TableCorrections corr;
    corr.raw_min_value = *std::min_element(values.begin(), values.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(y[i] + y[n - 1 - i]) > 1e-9 * extent) {
            throw std::invalid_argument("tabulated kernel: grid is not symmetric about 0");
        }
        if (values[i] < 0.0 || !std::isfinite(values[i])) {
            throw std::invalid_argument("tabulated kernel: J must be finite and nonnegative");
        }
    }
    std::vector<double> sym(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mirror = values[n - 1 - i];
        corr.raw_symmetry_defect = std::max(corr.raw_symmetry_defect, std::abs(values[i] - mirror));
        sym[i] = 0.5 * (values[i] + mirror);
    }
    std::vector<double> ysym(n);
    for (std::size_t i = 0; i < n; ++i) {
        ysym[i] = 0.5 * (y[i] - y[n - 1 - i]);  // exact antisymmetry of the abscissae
    }
    y = std::move(ysym);
    double raw_mass = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        raw_mass += 0.5 * (y[i] - y[i - 1]) * (values[i] + values[i - 1]);
    }
    double sym_mass = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        sym_mass += 0.5 * (y[i] - y[i - 1]) * (sym[i] + sym[i - 1]);
    }
    if (!(sym_mass > 0.0)) {
        throw std::invalid_argument("tabulated kernel has zero mass");
    }
    corr.raw_mass = raw_mass;
    for (double& v : sym) {
        v /= sym_mass;
    }
    Kernel k;
    k.family_ = KernelFamily::Tabulated;
    k.lambda_hat_ = lambda_hat;
    k.support_ = y.back();
    k.table_ = std::make_shared<const Table>(Table{std::move(y), std::move(sym), corr});
    return k;
}

Kernel Kernel::load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open kernel table " + path.string());
    }
    std::string header;
    while (std::getline(in, header)) {
        if (header.find_first_not_of(" \t\r") != std::string::npos) {
            break;
        }
    }
    const auto eq = header.find('=');
    if (eq == std::string::npos || header.substr(0, eq).find("lambda_hat") == std::string::npos) {
        throw std::runtime_error("kernel table " + path.string() +
                                 ": first line must be lambda_hat=<value|inf>");
    }
    std::string value = header.substr(eq + 1);
    value.erase(std::remove_if(value.begin(), value.end(), ::isspace), value.end());
    double lambda_hat = 0.0;
    if (value == "inf" || value == "Inf" || value == "infinity") {
        lambda_hat = kInf;
    } else {
        try {
            std::size_t used = 0;
            lambda_hat = std::stod(value, &used);
            if (used != value.size()) {
                throw std::invalid_argument(value);
            }
        } catch (const std::exception&) {
            throw std::runtime_error("kernel table " + path.string() + ": bad lambda_hat '" +
                                     value + "'");
        }
    }
    std::vector<double> ys;
    std::vector<double> js;
    double yv = 0.0;
    double jv = 0.0;
    while (in >> yv >> jv) {
        ys.push_back(yv);
        js.push_back(jv);
    }
    if (!in.eof()) {
        throw std::runtime_error("kernel table " + path.string() + ": malformed (y, J) pair");
    }
    return tabulated(std::move(ys), std::move(js), lambda_hat);
}

std::optional<double> Kernel::support_radius() const {
    switch (family_) {
        case KernelFamily::Uniform:
        case KernelFamily::Triangular:
        case KernelFamily::TruncatedGaussian:
        case KernelFamily::Tabulated:
            return support_;
        default:
            return std::nullopt;
    }
}

double Kernel::effective_radius() const {
    switch (family_) {
        case KernelFamily::Laplace:
            return std::log(1.0 / kTailMass) / alpha_;
        case KernelFamily::Gaussian:
            return gaussian_tail_radius(sigma_);
        default:
            return support_;
    }
}

double Kernel::length_scale() const {
    switch (family_) {
        case KernelFamily::Laplace:
            return 1.0 / alpha_;
        case KernelFamily::Gaussian:
            return sigma_;
        case KernelFamily::TruncatedGaussian:
            return std::min(sigma_, support_);
        default:
            return support_;
    }
}

std::vector<double> Kernel::interior_kinks() const {
    switch (family_) {
        case KernelFamily::Triangular:
        case KernelFamily::Laplace:
            return {0.0};
        case KernelFamily::Tabulated:
            return {table_->y.begin() + 1, table_->y.end() - 1};
        default:
            return {};
    }
}

bool Kernel::discontinuous_at_support_edge() const {
    switch (family_) {
        case KernelFamily::Uniform:
        case KernelFamily::TruncatedGaussian:
            return true;
        case KernelFamily::Tabulated:
            return table_->values.front() > 0.0;
        default:
            return false;
    }
}

double Kernel::operator()(double y) const {
    const double ay = std::abs(y);
    switch (family_) {
        case KernelFamily::Uniform:
            return ay <= support_ ? 0.5 / support_ : 0.0;
        case KernelFamily::Triangular:
            return ay <= support_ ? (support_ - ay) / (support_ * support_) : 0.0;
        case KernelFamily::TruncatedGaussian:
            return ay <= support_ ? norm_ * std::exp(-0.5 * y * y / (sigma_ * sigma_)) : 0.0;
        case KernelFamily::Laplace:
            return 0.5 * alpha_ * std::exp(-alpha_ * ay);
        case KernelFamily::Gaussian:
            return std::exp(-0.5 * y * y / (sigma_ * sigma_)) /
                   (sigma_ * std::sqrt(2.0 * std::numbers::pi));
        case KernelFamily::Tabulated: {
            const auto& ty = table_->y;
            const auto& tv = table_->values;
            if (y < ty.front() || y > ty.back()) {
                return 0.0;
            }
            auto it = std::upper_bound(ty.begin(), ty.end(), y);
            if (it == ty.end()) {
                return tv.back();
            }
            const std::size_t hi = static_cast<std::size_t>(it - ty.begin());
            const std::size_t lo = hi - 1;
            const double w = (y - ty[lo]) / (ty[hi] - ty[lo]);
            return (1.0 - w) * tv[lo] + w * tv[hi];
        }
    }
    return 0.0;
}

const std::vector<double>& Kernel::table_y() const {
    if (!table_) {
        throw std::logic_error("kernel is not tabulated");
    }
    return table_->y;
}

const std::vector<double>& Kernel::table_values() const {
    if (!table_) {
        throw std::logic_error("kernel is not tabulated");
    }
    return table_->values;
}

const TableCorrections* Kernel::corrections() const {
    return table_ ? &table_->corrections : nullptr;
}

std::string Kernel::describe() const {
    std::ostringstream os;
    os << to_string(family_) << '(';
    switch (family_) {
        case KernelFamily::Uniform:
        case KernelFamily::Triangular:
            os << "S=" << support_;
            break;
        case KernelFamily::TruncatedGaussian:
            os << "sigma=" << sigma_ << ", S=" << support_;
            break;
        case KernelFamily::Laplace:
            os << "alpha=" << alpha_;
            break;
        case KernelFamily::Gaussian:
            os << "sigma=" << sigma_;
            break;
        case KernelFamily::Tabulated:
            os << table_->y.size() << " samples, lambda_hat=" << lambda_hat_;
            break;
    }
    os << ')';
    return os.str();
}

double evaluate(const Kernel& kernel, double y) { return kernel(y); }

double moment_by_quadrature(const Kernel& kernel, double lambda, int power, double abs_tol) {
    check_domain(kernel, lambda);
    auto integrand = [&](double y) {
        const double j = kernel(y);
        if (j == 0.0) {
            return 0.0;  // keeps an underflowed J from meeting an overflowed exponential
        }
        double v = j * std::exp(lambda * y);
        for (int p = 0; p < power; ++p) {
            v *= y;
        }
        return v;
    };
    double radius = kernel.effective_radius();
    if (!kernel.support_radius()) {
        // extend until the exponentially weighted tail is negligible
        auto tail = [&](double r) {
            return std::max(std::abs(integrand(r)), std::abs(integrand(-r))) * std::max(r, 1.0);
        };
        while (tail(radius) > 1e-3 * abs_tol && radius < 1e6) {
            radius *= 1.5;
        }
    }
    std::vector<double> cuts{-radius, 0.0, radius};
    for (double k : kernel.interior_kinks()) {
        if (k > -radius && k < radius) {
            cuts.push_back(k);
        }
    }
    if (!kernel.support_radius()) {
        // geometric pieces keep each panel comparable to the local decay scale
        for (double r = kernel.length_scale(); r < radius; r *= 2.0) {
            cuts.push_back(r);
            cuts.push_back(-r);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Gauss-Kronrod nodes are interior, so one-sided limits are used at kinks
        total += numerics::gauss_kronrod(integrand, cuts[i], cuts[i + 1], piece_tol);
    }
    return total;
}

namespace {

double closed_or_quadrature(const Kernel& k, double lambda, int order) {
    check_domain(k, lambda);
    switch (k.family()) {
        case KernelFamily::Uniform:
            return uniform_moment(k.support(), lambda, order);
        case KernelFamily::Triangular:
            return triangular_moment(k.support(), lambda, order);
        case KernelFamily::Laplace: {
            const double a2 = k.alpha() * k.alpha();
            const double l2 = lambda * lambda;
            const double den = a2 - l2;
            switch (order) {
                case 0:
                    return a2 / den;
                case 1:
                    return 2.0 * a2 * lambda / (den * den);
                default:
                    return 2.0 * a2 * (a2 + 3.0 * l2) / (den * den * den);
            }
        }
        case KernelFamily::Gaussian: {
            const double s2 = k.sigma() * k.sigma();
            const double base = std::exp(0.5 * s2 * lambda * lambda);
            switch (order) {
                case 0:
                    return base;
                case 1:
                    return s2 * lambda * base;
                default:
                    return (s2 + s2 * s2 * lambda * lambda) * base;
            }
        }
        case KernelFamily::TruncatedGaussian:
            if (order == 0) {
                const double s = k.sigma();
                const double r2 = s * std::numbers::sqrt2;
                const double shift = s * s * lambda;
                const double lo = std::min(k.support() - shift, k.support() + shift) / r2;
                const double hi = std::max(k.support() - shift, k.support() + shift) / r2;
                return std::exp(0.5 * shift * lambda) * erf_sum(lo, hi) /
                       (2.0 * std::erf(k.support() / r2));
            }
            return moment_by_quadrature(k, lambda, order, 1e-13);
        case KernelFamily::Tabulated:
            return moment_by_quadrature(k, lambda, order, 1e-13);
    }
    return 0.0;
}

}  // namespace

double mgf(const Kernel& kernel, double lambda) { return closed_or_quadrature(kernel, lambda, 0); }

double mgf_d1(const Kernel& kernel, double lambda) {
    return closed_or_quadrature(kernel, lambda, 1);
}

double mgf_d2(const Kernel& kernel, double lambda) {
    return closed_or_quadrature(kernel, lambda, 2);
}

ValidationReport validate(const Kernel& kernel) {
    ValidationReport report;
    const double radius = kernel.effective_radius();

    std::vector<double> samples;
    constexpr int kSamples = 4001;
    for (int i = 0; i < kSamples; ++i) {
        samples.push_back(-radius + 2.0 * radius * i / (kSamples - 1));
    }
    if (kernel.family() == KernelFamily::Tabulated) {
        samples.insert(samples.end(), kernel.table_y().begin(), kernel.table_y().end());
    }
    report.min_value = kInf;
    for (double y : samples) {
        const double v = kernel(y);
        report.min_value = std::min(report.min_value, v);
        report.symmetry_defect = std::max(report.symmetry_defect, std::abs(v - kernel(-y)));
    }
    report.normalization_defect = std::abs(moment_by_quadrature(kernel, 0.0, 0) - 1.0);

    if (const TableCorrections* corr = kernel.corrections()) {
        report.normalization_defect = std::abs(corr->raw_mass - 1.0);
        report.symmetry_defect = std::max(report.symmetry_defect, corr->raw_symmetry_defect);
        report.min_value = std::min(report.min_value, corr->raw_min_value);
    }

    if (report.normalization_defect > 1e-8) {
        std::ostringstream os;
        os << "normalization defect " << report.normalization_defect << " exceeds 1e-8";
        report.failures.push_back(os.str());
    }
    if (report.symmetry_defect > 1e-12) {
        std::ostringstream os;
        os << "symmetry defect " << report.symmetry_defect << " exceeds 1e-12";
        report.failures.push_back(os.str());
    }
    if (report.min_value < 0.0) {
        report.failures.push_back("negative density sample");
    }

    const double lhat = kernel.lambda_hat();
    std::vector<double> probe_points;
    if (std::isfinite(lhat)) {
        for (double f : {0.5, 0.9, 0.99, 0.9995}) {
            probe_points.push_back(f * lhat);
        }
    } else {
        for (double f : {1.0, 5.0, 20.0}) {
            probe_points.push_back(f / kernel.length_scale());
        }
    }
    for (double lambda : probe_points) {
        MgfProbe probe{lambda, std::nullopt, {}};
        try {
            probe.value = mgf(kernel, lambda);
            if (!std::isfinite(*probe.value)) {
                report.lambda_hat_consistent = false;
            }
        } catch (const DomainError& e) {
            probe.error = e.what();
            report.lambda_hat_consistent = false;
        }
        report.probes.push_back(probe);
    }
    if (std::isfinite(lhat)) {
        // at lambda_hat itself a domain error is the expected outcome
        MgfProbe probe{lhat, std::nullopt, {}};
        try {
            probe.value = mgf(kernel, lhat);
            report.lambda_hat_consistent = false;
        } catch (const DomainError& e) {
            probe.error = std::string("expected: ") + e.what();
        }
        report.probes.push_back(probe);
    }
    if (!report.lambda_hat_consistent) {
        report.failures.push_back("exponential moments inconsistent with declared lambda_hat");
    }
    return report;
}

}  // namespace nlwave
