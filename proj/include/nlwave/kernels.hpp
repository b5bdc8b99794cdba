#pragma once

// Symmetric dispersal kernels J (nonnegative, continuous, unit mass, even)
// together with their exponential moments
//
//   I(lambda)   = int J(y) e^{lambda y} dy
//   I'(lambda)  = int J(y) y e^{lambda y} dy
//   I''(lambda) = int J(y) y^2 e^{lambda y} dy
//
// which are finite for |lambda| < lambda_hat.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nlwave {

enum class KernelFamily { Uniform, Triangular, TruncatedGaussian, Laplace, Gaussian, Tabulated };

std::string to_string(KernelFamily family);

/// Corrections applied when a tabulated kernel was loaded.
struct TableCorrections {
    double raw_mass = 1.0;                ///< trapezoid mass before renormalisation
    double raw_symmetry_defect = 0.0;     ///< max |J(y) - J(-y)| before symmetrisation
    double raw_min_value = 0.0;           ///< smallest sample as given
};

class Kernel {
public:
    static Kernel uniform(double support);
    static Kernel triangular(double support);
    static Kernel truncated_gaussian(double sigma, double support);
    static Kernel laplace(double alpha);
    static Kernel gaussian(double sigma);
    /// Samples must lie on a grid symmetric about 0 with increasing abscissae.
    /// The table is symmetrised by averaging J(y) and J(-y), then renormalised
    /// to unit trapezoid mass. lambda_hat is taken as declared.
    static Kernel tabulated(std::vector<double> y, std::vector<double> values, double lambda_hat);
    /// Header line `lambda_hat=<value|inf>`, then whitespace separated `y J(y)` pairs.
    static Kernel load_table(const std::filesystem::path& path);

    KernelFamily family() const { return family_; }
    double lambda_hat() const { return lambda_hat_; }
    std::optional<double> support_radius() const;
    /// Radius beyond which the neglected mass is at most 1e-10 (the support
    /// radius for compactly supported families).
    double effective_radius() const;
    /// Characteristic length used for grid-resolution warnings.
    double length_scale() const;
    /// Points in (-R, R) where J is not smooth (excluding the ends of support).
    std::vector<double> interior_kinks() const;
    /// True when J jumps to zero at the end of its support.
    bool discontinuous_at_support_edge() const;

    double operator()(double y) const;

    double support() const { return support_; }
    double sigma() const { return sigma_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& table_y() const;
    const std::vector<double>& table_values() const;
    const TableCorrections* corrections() const;

    std::string describe() const;

private:
    struct Table {
        std::vector<double> y;
        std::vector<double> values;
        TableCorrections corrections;
    };

    Kernel() = default;

    KernelFamily family_ = KernelFamily::Uniform;
    double support_ = 0.0;
    double sigma_ = 0.0;
    double alpha_ = 0.0;
    double norm_ = 1.0;  // density prefactor (truncated gaussian)
    double lambda_hat_ = 0.0;
    std::shared_ptr<const Table> table_;
};

/// J(y); zero outside the support (and outside the grid for tabulated kernels).
double evaluate(const Kernel& kernel, double y);

/// I(lambda). Throws DomainError when |lambda| >= lambda_hat.
double mgf(const Kernel& kernel, double lambda);
/// I'(lambda).
double mgf_d1(const Kernel& kernel, double lambda);
/// I''(lambda).
double mgf_d2(const Kernel& kernel, double lambda);

/// int J(y) y^power e^{lambda y} dy by adaptive Simpson quadrature, split at
/// the kernel's kinks, independent of any closed form.
double moment_by_quadrature(const Kernel& kernel, double lambda, int power,
                            double abs_tol = 1e-12);

struct MgfProbe {
    double lambda = 0.0;
    std::optional<double> value;  ///< absent when a domain error was raised
    std::string error;
};

struct ValidationReport {
    double normalization_defect = 0.0;  ///< |mass - 1| (as loaded for tabulated kernels)
    double symmetry_defect = 0.0;       ///< max |J(y) - J(-y)| (as loaded for tabulated kernels)
    double min_value = 0.0;             ///< smallest sampled J
    bool lambda_hat_consistent = true;  ///< finite below lambda_hat, domain error at it
    std::vector<MgfProbe> probes;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

ValidationReport validate(const Kernel& kernel);

}  // namespace nlwave
