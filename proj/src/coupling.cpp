#include "conlab/coupling.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace conlab {

const char* to_string(CouplingKind kind) noexcept {
    switch (kind) {
        case CouplingKind::Linear: return "linear";
        case CouplingKind::OddPolynomial: return "odd_polynomial";
        case CouplingKind::Sine: return "sine";
        case CouplingKind::Custom: return "custom";
    }
    return "custom";
}

CouplingFunction CouplingFunction::linear(double slope) {
    if (!std::isfinite(slope)) throw Error(ErrorCode::InvalidCoupling, "non-finite slope");
    CouplingFunction f;
    f.kind_ = CouplingKind::Linear;
    f.coeffs_ = {slope};
    return f;
}

CouplingFunction CouplingFunction::odd_polynomial(std::vector<double> odd_coeffs) {
    if (odd_coeffs.empty()) throw Error(ErrorCode::InvalidCoupling, "empty coefficient list");
    for (double c : odd_coeffs) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidCoupling, "non-finite coefficient");
    }
    CouplingFunction f;
    f.kind_ = CouplingKind::OddPolynomial;
    f.coeffs_ = std::move(odd_coeffs);
    return f;
}

CouplingFunction CouplingFunction::sine(double amplitude) {
    if (!std::isfinite(amplitude)) throw Error(ErrorCode::InvalidCoupling, "non-finite amplitude");
    CouplingFunction f;
    f.kind_ = CouplingKind::Sine;
    f.amplitude_ = amplitude;
    return f;
}

CouplingFunction CouplingFunction::custom(std::string name, ScalarFn value, ScalarFn derivative,
                                          ScalarFn antiderivative, std::vector<double> known_roots) {
    if (!value || !derivative) {
        throw Error(ErrorCode::InvalidCoupling, "custom coupling needs value and derivative");
    }
    constexpr int samples = 200;
    constexpr double span = 4.0;
    constexpr double h = 1e-4;
    for (int i = 0; i <= samples; ++i) {
        const double y = -span + 2.0 * span * i / samples;
        const double fy = value(y);
        if (!std::isfinite(fy)) throw Error(ErrorCode::InvalidCoupling, "non-finite value at " + std::to_string(y));
        if (std::abs(fy + value(-y)) > 1e-10 * (1.0 + std::abs(fy))) {
            throw Error(ErrorCode::InvalidCoupling, name + " is not odd at y=" + std::to_string(y));
        }
        const double central = (value(y + h) - value(y - h)) / (2.0 * h);
        if (std::abs(derivative(y) - central) > 1e-6) {
            throw Error(ErrorCode::InvalidCoupling, name + " derivative mismatch at y=" + std::to_string(y));
        }
    }
    if (antiderivative && std::abs(antiderivative(0.0)) > 1e-12) {
        throw Error(ErrorCode::InvalidCoupling, name + " antiderivative must vanish at 0");
    }
    CouplingFunction f;
    f.kind_ = CouplingKind::Custom;
    f.name_ = std::move(name);
    f.value_ = std::make_shared<const ScalarFn>(std::move(value));
    f.derivative_ = std::make_shared<const ScalarFn>(std::move(derivative));
    if (antiderivative) f.antiderivative_ = std::make_shared<const ScalarFn>(std::move(antiderivative));
    std::sort(known_roots.begin(), known_roots.end());
    f.known_roots_ = std::move(known_roots);
    return f;
}

double CouplingFunction::eval(double y) const {
    switch (kind_) {
        case CouplingKind::Linear: return coeffs_[0] * y;
        case CouplingKind::OddPolynomial: {
            // Horner in y^2: f = y * (a1 + y^2 (a3 + y^2 (...))).
            const double y2 = y * y;
            double acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * y2 + *it;
            return acc * y;
        }
        case CouplingKind::Sine: return -amplitude_ * std::sin(y);
        case CouplingKind::Custom: return (*value_)(y);
    }
    return 0.0;
}

double CouplingFunction::derivative(double y) const {
    switch (kind_) {
        case CouplingKind::Linear: return coeffs_[0];
        case CouplingKind::OddPolynomial: {
            const double y2 = y * y;
            double acc = 0.0;
            for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * y2 + static_cast<double>(2 * i + 1) * coeffs_[i];
            return acc;
        }
        case CouplingKind::Sine: return -amplitude_ * std::cos(y);
        case CouplingKind::Custom: return (*derivative_)(y);
    }
    return 0.0;
}

double CouplingFunction::antiderivative(double y) const {
    switch (kind_) {
        case CouplingKind::Linear: return 0.5 * coeffs_[0] * y * y;
        case CouplingKind::OddPolynomial: {
            const double y2 = y * y;
            double acc = 0.0;
            for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * y2 + coeffs_[i] / static_cast<double>(2 * i + 2);
            return acc * y2;
        }
        case CouplingKind::Sine: return amplitude_ * std::cos(y) - amplitude_;
        case CouplingKind::Custom:
            if (!antiderivative_) throw Error(ErrorCode::NotAvailable, name_ + " has no antiderivative");
            return (*antiderivative_)(y);
    }
    return 0.0;
}

bool CouplingFunction::has_antiderivative() const noexcept {
    return kind_ != CouplingKind::Custom || antiderivative_ != nullptr;
}

int CouplingFunction::degree() const noexcept {
    if (!is_polynomial()) return -1;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        if (coeffs_[i] != 0.0) return static_cast<int>(2 * i + 1);
    }
    return 0;
}

std::string CouplingFunction::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case CouplingKind::Linear: out << "linear(" << coeffs_[0] << ")"; break;
        case CouplingKind::OddPolynomial: {
            out << "odd_polynomial(";
            for (std::size_t i = 0; i < coeffs_.size(); ++i) out << (i ? "," : "") << coeffs_[i];
            out << ")";
            break;
        }
        case CouplingKind::Sine: out << "sine(" << amplitude_ << ")"; break;
        case CouplingKind::Custom: out << "custom(" << name_ << ")"; break;
    }
    return out.str();
}

namespace {

double bisect(const std::function<double(double)>& g, double lo, double hi, double glo, double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (!std::isfinite(gm)) throw Error(ErrorCode::RootFindingFailed, "non-finite value during bisection");
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// One guarded Newton correction; kept only if it reduces |g|.
double polish(const CouplingFunction& f, double lambda, double r) {
    for (int it = 0; it < 3; ++it) {
        const double g = f.eval(r) - lambda;
        const double dg = f.derivative(r);
        if (g == 0.0 || dg == 0.0) break;
        const double next = r - g / dg;
        if (!(std::abs(next - r) < 1e-8) || std::abs(f.eval(next) - lambda) >= std::abs(g)) break;
        r = next;
    }
    return r;
}

// Sign-change roots of g = f - lambda on [lo, hi] plus tangent roots located at
// sign changes of f' where |g| is at rounding level.
std::vector<double> scan_roots(const CouplingFunction& f, double lambda, double lo, double hi,
                               const RootOptions& options, int intervals) {
    auto g = [&](double y) { return f.eval(y) - lambda; };
    auto dg = [&](double y) { return f.derivative(y); };
    std::vector<double> found;
    const double step = (hi - lo) / intervals;
    double y0 = lo;
    double g0 = g(y0);
    double d0 = dg(y0);
    if (!std::isfinite(g0) || !std::isfinite(d0)) throw Error(ErrorCode::RootFindingFailed, "non-finite value on grid");
    if (g0 == 0.0) found.push_back(y0);
    for (int i = 1; i <= intervals; ++i) {
        const double y1 = i == intervals ? hi : lo + step * i;
        const double g1 = g(y1);
        const double d1 = dg(y1);
        if (!std::isfinite(g1) || !std::isfinite(d1)) throw Error(ErrorCode::RootFindingFailed, "non-finite value on grid");
        if (g1 == 0.0) {
            found.push_back(y1);
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            found.push_back(polish(f, lambda, bisect(g, y0, y1, g0, options.tolerance)));
        } else if (g0 != 0.0 && d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0)) {
            const double c = bisect(dg, y0, y1, d0, options.tolerance);
            const double scale = 1.0 + std::abs(f.eval(c)) + std::abs(lambda);
            if (std::abs(g(c)) <= 1e-12 * scale) found.push_back(c);
        }
        y0 = y1;
        g0 = g1;
        d0 = d1;
    }
    std::sort(found.begin(), found.end());
    std::vector<double> unique;
    for (double r : found) {
        if (unique.empty() || std::abs(r - unique.back()) > 1e-9) unique.push_back(r);
    }
    return unique;
}

}  // namespace

std::vector<double> roots(const CouplingFunction& f, double bound, const RootOptions& options) {
    if (!(bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "root bound must be positive");
    if ((f.is_polynomial() && f.degree() == 0) || (f.kind() == CouplingKind::Sine && f.amplitude() == 0.0)) {
        throw Error(ErrorCode::RootFindingFailed, "coupling vanishes identically");
    }
    std::vector<double> positive;
    if (f.kind() == CouplingKind::Sine) {
        for (int k = 1; k * std::numbers::pi <= bound; ++k) positive.push_back(k * std::numbers::pi);
    } else if (f.kind() == CouplingKind::Custom && !f.known_roots().empty()) {
        for (double r : f.known_roots()) {
            if (r > 0.0 && r <= bound) positive.push_back(r);
        }
    } else if (f.kind() == CouplingKind::Linear && f.odd_coefficients()[0] != 0.0) {
        // only the origin
    } else {
        // Scan (0, bound]; the odd symmetry supplies the negative half.
        const int half = std::max(1, options.grid_intervals / 2);
        for (double r : scan_roots(f, 0.0, 0.0, bound, options, half)) {
            if (r > 1e-9) positive.push_back(r);
        }
    }
    std::vector<double> all;
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) all.push_back(-*it);
    all.push_back(0.0);
    all.insert(all.end(), positive.begin(), positive.end());
    return all;
}

std::vector<double> roots_shifted(const CouplingFunction& f, double lambda, double bound, const RootOptions& options) {
    if (lambda == 0.0) return roots(f, bound, options);
    if (!(bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "root bound must be positive");
    return scan_roots(f, lambda, -bound, bound, options, options.grid_intervals);
}

std::vector<double> positive_roots(std::span<const double> all_roots) {
    std::vector<double> out;
    for (double r : all_roots) {
        if (r > 0.0) out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_additive_open(std::span<const double> positive) {
    for (double a : positive)
        for (double b : positive)
            for (double c : positive)
                if (std::abs(a + b - c) <= 1e-10) return false;
    return true;
}

bool is_degenerate_root(const CouplingFunction& f, double r) { return std::abs(f.derivative(r)) <= 1e-8; }

std::vector<std::string> degenerate_root_warnings(const CouplingFunction& f, std::span<const double> root_list) {
    std::vector<std::string> out;
    for (double r : root_list) {
        if (is_degenerate_root(f, r)) {
            out.push_back("DegenerateRoot: " + f.describe() + " has |f'| <= 1e-8 at y=" + std::to_string(r));
        }
    }
    return out;
}

}  // namespace conlab
