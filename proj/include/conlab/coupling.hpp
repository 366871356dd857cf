#pragma once

// Odd coupling functions f with f' and the antiderivative F (F(0) = 0), plus
// root queries for f and f - lambda.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conlab {

enum class CouplingKind { Linear, OddPolynomial, Sine, Custom };

[[nodiscard]] const char* to_string(CouplingKind kind) noexcept;

class CouplingFunction {
public:
    using ScalarFn = std::function<double(double)>;

    /// f(y) = slope * y.
    static CouplingFunction linear(double slope);
    /// f(y) = a1 y + a3 y^3 + a5 y^5 + ...; `odd_coeffs` = {a1, a3, a5, ...}.
    static CouplingFunction odd_polynomial(std::vector<double> odd_coeffs);
    /// f(y) = -amplitude * sin(y).
    static CouplingFunction sine(double amplitude);
    /// Validated for oddness and derivative consistency on a grid. Throws InvalidCoupling.
    static CouplingFunction custom(std::string name, ScalarFn value, ScalarFn derivative,
                                   ScalarFn antiderivative = {}, std::vector<double> known_roots = {});

    /// The y - y^3 coupling used throughout the examples.
    static CouplingFunction cubic() { return odd_polynomial({1.0, -1.0}); }

    [[nodiscard]] CouplingKind kind() const noexcept { return kind_; }
    [[nodiscard]] double operator()(double y) const { return eval(y); }
    [[nodiscard]] double eval(double y) const;
    [[nodiscard]] double derivative(double y) const;
    /// Throws NotAvailable for a Custom function built without one.
    [[nodiscard]] double antiderivative(double y) const;
    [[nodiscard]] bool has_antiderivative() const noexcept;

    /// Linear and OddPolynomial are polynomials; Linear reports {slope}.
    [[nodiscard]] bool is_polynomial() const noexcept {
        return kind_ == CouplingKind::Linear || kind_ == CouplingKind::OddPolynomial;
    }
    [[nodiscard]] const std::vector<double>& odd_coefficients() const noexcept { return coeffs_; }
    /// Highest power with a nonzero coefficient (polynomials only, else -1).
    [[nodiscard]] int degree() const noexcept;
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] const std::vector<double>& known_roots() const noexcept { return known_roots_; }

    [[nodiscard]] std::string describe() const;

private:
    CouplingKind kind_ = CouplingKind::Linear;
    std::vector<double> coeffs_;
    double amplitude_ = 0.0;
    std::string name_;
    // Shared so copies stay cheap; the callables never change after construction.
    std::shared_ptr<const ScalarFn> value_;
    std::shared_ptr<const ScalarFn> derivative_;
    std::shared_ptr<const ScalarFn> antiderivative_;
    std::vector<double> known_roots_;
};

struct RootOptions {
    int grid_intervals = 10000;
    double tolerance = 1e-12;
};

/// Zeros of f in [-bound, bound], ascending, symmetric, always containing 0.
/// Throws RootFindingFailed.
[[nodiscard]] std::vector<double> roots(const CouplingFunction& f, double bound, const RootOptions& options = {});

/// Zeros of f - lambda in [-bound, bound], ascending.
[[nodiscard]] std::vector<double> roots_shifted(const CouplingFunction& f, double lambda, double bound,
                                                const RootOptions& options = {});

/// Strictly positive entries of a root list.
[[nodiscard]] std::vector<double> positive_roots(std::span<const double> all_roots);

/// No a + b = c (within 1e-10) among the positive roots, a = b allowed.
[[nodiscard]] bool is_additive_open(std::span<const double> positive);

/// |f'(r)| <= 1e-8: the stability theory assumes simple roots.
[[nodiscard]] bool is_degenerate_root(const CouplingFunction& f, double r);

/// Human-readable warnings for degenerate roots in the list.
[[nodiscard]] std::vector<std::string> degenerate_root_warnings(const CouplingFunction& f,
                                                                std::span<const double> root_list);

}  // namespace conlab
