#include "conlab/stability.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace conlab {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::Unstable: return "Unstable";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

const char* to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::Stable: return "Stable";
        case Outcome::Unstable: return "Unstable";
        case Outcome::Boundary: return "Boundary";
        case Outcome::NotLinearlyStable: return "NotLinearlyStable";
        case Outcome::NoConclusion: return "NoConclusion";
        case Outcome::NotApplicable: return "NotApplicable";
    }
    return "NoConclusion";
}

Verdict to_verdict(Outcome o) noexcept {
    switch (o) {
        case Outcome::Stable: return Verdict::Stable;
        case Outcome::Unstable: return Verdict::Unstable;
        default: return Verdict::Inconclusive;
    }
}

namespace {

constexpr double rho_margin = 1e-9;

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

std::string fmt(const Inertia& in) {
    return "(n+=" + std::to_string(in.plus) + ", n-=" + std::to_string(in.minus) + ", n0=" + std::to_string(in.zero) + ")";
}

std::string fmt_values(const Eigen::VectorXd& v) {
    std::string out = "{";
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v(i));
    return out + "}";
}

Verdict sign_verdict(const Inertia& in) {
    if (in.plus > 0) return Verdict::Unstable;
    if (in.zero > 0) return Verdict::Inconclusive;
    return Verdict::Stable;
}

// Drops the value nearest 0 and classifies the rest against the threshold
// computed on the full spectrum.
StabilityVerdict verdict_from_full_spectrum(const Eigen::VectorXd& values, double tol_zero) {
    StabilityVerdict out;
    const double threshold = zero_threshold(values, tol_zero);
    Eigen::Index nearest = 0;
    values.cwiseAbs().minCoeff(&nearest);
    if (values.size() == 0 || std::abs(values(nearest)) > threshold) {
        throw Error(ErrorCode::MissingTrivialKernel,
                    "no eigenvalue within " + fmt(threshold) + " of 0 in " + fmt_values(values));
    }
    out.spectrum.resize(values.size() - 1);
    for (Eigen::Index i = 0, k = 0; i < values.size(); ++i) {
        if (i != nearest) out.spectrum(k++) = values(i);
    }
    for (Eigen::Index i = 0; i < out.spectrum.size(); ++i) {
        if (std::abs(out.spectrum(i)) <= threshold) ++out.inertia.zero;
        else if (out.spectrum(i) > 0) ++out.inertia.plus;
        else ++out.inertia.minus;
    }
    out.verdict = sign_verdict(out.inertia);
    return out;
}

Evidence spectral_evidence(const StabilityVerdict& v) {
    return {"spectral", "spectrum on mean-zero plane " + fmt_values(v.spectrum) + ", inertia " + fmt(v.inertia),
            to_string(v.verdict)};
}

std::vector<int> union_components(int n, const std::vector<std::pair<int, int>>& links) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (const auto& [a, b] : links) parent[static_cast<std::size_t>(find(a))] = find(b);
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<int> root_label(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(find(i));
        if (root_label[r] < 0) root_label[r] = next++;
        label[static_cast<std::size_t>(i)] = root_label[r];
    }
    return label;
}

}  // namespace

StabilityVerdict spectral_verdict(const Eigen::MatrixXd& j, double tol_zero) {
    const auto eig = eigen_symmetric(j);
    StabilityVerdict out = verdict_from_full_spectrum(eig.values, tol_zero);
    out.evidence.push_back(spectral_evidence(out));
    return out;
}

CutSetResult cut_set_test(const SignedSplit& split, const std::vector<int>& side) {
    const Graph& g = split.graph;
    std::vector<char> in_side(static_cast<std::size_t>(g.node_count()), 0);
    for (int v : side) {
        if (v < 0 || v >= g.node_count()) throw Error(ErrorCode::IndexOutOfRange, "cut side node");
        in_side[static_cast<std::size_t>(v)] = 1;
    }
    const auto count = std::count(in_side.begin(), in_side.end(), 1);
    if (count == 0 || count == g.node_count()) throw Error(ErrorCode::InvalidArgument, "both cut sides must be nonempty");
    CutSetResult out;
    out.side = side;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (in_side[static_cast<std::size_t>(g.edge(e).u)] != in_side[static_cast<std::size_t>(g.edge(e).v)]) {
            out.sum += split.derivatives(e);
        }
    }
    out.outcome = out.sum > 0.0 ? Outcome::Unstable : Outcome::NoConclusion;
    return out;
}

CutSetResult cut_set_scan(const SignedSplit& split) {
    const Graph& g = split.graph;
    CutSetResult best;
    best.sum = -std::numeric_limits<double>::infinity();
    best.description = "no cut";
    if (g.node_count() < 2) return best;
    auto consider = [&](const std::vector<int>& side, const std::string& what) {
        CutSetResult r = cut_set_test(split, side);
        r.description = what;
        if (r.sum > best.sum) best = r;
        return r.outcome == Outcome::Unstable;
    };
    for (int i = 0; i < g.node_count(); ++i) {
        if (consider({i}, "node " + std::to_string(i + 1))) return best;
    }
    if (split.minus.component_count > 1) {
        for (int c = 0; c < split.minus.component_count; ++c) {
            std::vector<int> side;
            for (int i = 0; i < g.node_count(); ++i)
                if (split.minus.components[static_cast<std::size_t>(i)] == c) side.push_back(i);
            if (static_cast<int>(side.size()) == g.node_count()) continue;
            if (consider(side, "G- component " + std::to_string(c + 1))) return best;
        }
    }
    return best;
}

ConnectivityResult connectivity_test(const SignedSplit& split) {
    ConnectivityResult out;
    out.minus_components = split.minus.component_count;
    if (split.minus.component_count <= 1) {
        out.outcome = split.plus_edges.empty() ? Outcome::Stable : Outcome::NoConclusion;
        return out;
    }
    for (int e : split.plus_edges) {
        const Edge& edge = split.graph.edge(e);
        if (split.minus.components[static_cast<std::size_t>(edge.u)] != split.minus.components[static_cast<std::size_t>(edge.v)]) {
            out.bridging_plus_edge = e;
            out.outcome = Outcome::Unstable;
            return out;
        }
    }
    out.outcome = Outcome::NotLinearlyStable;
    return out;
}

SignedSplit split_from_matrix(const Eigen::MatrixXd& j, double tol_rel, double scale_hint) {
    const auto n = static_cast<int>(j.rows());
    const double scale = std::max(scale_hint, n == 0 ? 0.0 : j.cwiseAbs().maxCoeff());
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> derivs;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double off = 0.5 * (j(a, b) + j(b, a));
            if (std::abs(off) > tol_rel * scale) {
                pairs.emplace_back(a, b);
                derivs.push_back(-off);
            }
        }
    }
    const Graph g(n, pairs);
    return split_from_derivatives(g, Eigen::Map<const Eigen::VectorXd>(derivs.data(), static_cast<Eigen::Index>(derivs.size())),
                                  0.0);
}

SchurReduction schur_reduce(const SignedSplit& split, double tol_zero) {
    if (split.minus.component_count != 1) {
        throw Error(ErrorCode::GMinusDisconnected,
                    "G- has " + std::to_string(split.minus.component_count) + " components");
    }
    SchurReduction out;
    Eigen::MatrixXd m = split.jacobian();
    // Fill-in can cancel an edge exactly; judge what is left against the original scale.
    const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
    out.labels.resize(static_cast<std::size_t>(m.rows()));
    std::iota(out.labels.begin(), out.labels.end(), 0);

    while (true) {
        const SignedSplit current = split_from_matrix(m, tol_zero, scale);
        if (current.plus_edges.empty()) break;
        std::vector<char> touches_plus(static_cast<std::size_t>(m.rows()), 0);
        for (int e : current.plus_edges) {
            touches_plus[static_cast<std::size_t>(current.graph.edge(e).u)] = 1;
            touches_plus[static_cast<std::size_t>(current.graph.edge(e).v)] = 1;
        }
        int pick = -1;
        for (int i = 0; i < m.rows(); ++i) {
            if (!touches_plus[static_cast<std::size_t>(i)] && m(i, i) < 0.0) {
                pick = i;
                break;
            }
        }
        if (pick < 0) break;

        SchurStep step;
        step.removed = out.labels[static_cast<std::size_t>(pick)];
        step.before = m;
        step.after = schur_complement(m, {pick});
        step.inertia_before = inertia(step.before, tol_zero);
        step.inertia_after = inertia(step.after, tol_zero);
        Eigen::VectorXd block(1);
        block(0) = m(pick, pick);
        step.inertia_block = block(0) < 0.0 ? Inertia{0, 1, 0} : Inertia{1, 0, 0};
        out.discarded += step.inertia_block;
        out.labels.erase(out.labels.begin() + pick);
        step.labels_after = out.labels;
        m = step.after;
        out.steps.push_back(std::move(step));
    }
    out.reduced = m;
    out.reduced_split = split_from_matrix(m, tol_zero, scale);
    return out;
}

OneEdgeResult one_edge_resistance_test(const SignedSplit& split) {
    OneEdgeResult out;
    std::vector<int> nonnegative = split.plus_edges;
    nonnegative.insert(nonnegative.end(), split.zero_edges.begin(), split.zero_edges.end());
    if (nonnegative.size() != 1) return out;
    const int e = nonnegative.front();
    const Edge& edge = split.graph.edge(e);
    const auto& comp = split.minus.components;
    const bool same = comp[static_cast<std::size_t>(edge.u)] == comp[static_cast<std::size_t>(edge.v)];
    if (split.minus.component_count == 1) {
        out.r_minus = effective_resistance(split.minus, edge.u, edge.v);
    } else if (split.minus.component_count == 2 && !same) {
        out.r_minus = std::numeric_limits<double>::infinity();
    } else {
        return out;
    }
    out.edge = e;
    out.derivative = split.derivatives(e);
    const bool positive = std::find(split.plus_edges.begin(), split.plus_edges.end(), e) != split.plus_edges.end();
    if (std::isinf(out.r_minus)) {
        out.rho = positive ? std::numeric_limits<double>::infinity() : 0.0;
        out.outcome = positive ? Outcome::Unstable : Outcome::Boundary;
        return out;
    }
    out.rho = out.derivative * out.r_minus;
    if (out.rho < 1.0 - rho_margin) out.outcome = Outcome::Stable;
    else if (out.rho > 1.0 + rho_margin) out.outcome = Outcome::Unstable;
    else out.outcome = Outcome::Boundary;
    return out;
}

MultiEdgeResult multi_edge_resistance_test(const SignedSplit& split) {
    const Graph& g = split.graph;
    std::vector<std::pair<int, int>> links;
    for (int e : split.plus_edges) links.emplace_back(g.edge(e).u, g.edge(e).v);
    for (int e : split.minus_edges) links.emplace_back(g.edge(e).u, g.edge(e).v);
    const auto labels = union_components(g.node_count(), links);
    if (g.node_count() > 0 && *std::max_element(labels.begin(), labels.end()) > 0) {
        throw Error(ErrorCode::DisconnectedUnion, "G+ and G- together leave the graph disconnected");
    }
    MultiEdgeResult out;
    const Eigen::MatrixXd r_minus = resistance_matrix(split.minus);
    for (int e : split.plus_edges) {
        const double term = split.derivatives(e) * r_minus(g.edge(e).u, g.edge(e).v);
        out.terms.emplace_back(e, term);
        out.sum += term;
        out.max_term = std::max(out.max_term, term);
    }
    if (out.max_term > 1.0 + rho_margin) out.outcome = Outcome::Unstable;
    else if (out.sum < 1.0 - rho_margin) out.outcome = Outcome::Stable;
    else out.outcome = Outcome::NoConclusion;
    return out;
}

std::pair<double, double> pair_resistances(const SignedSplit& split, int i, int j) {
    return {effective_resistance(split.plus, i, j), effective_resistance(split.minus, i, j)};
}

ResistancePairResult resistance_pair_test(const SignedSplit& split, const std::vector<std::pair<int, int>>& pairs) {
    const int n = split.graph.node_count();
    std::vector<std::pair<int, int>> todo = pairs;
    if (todo.empty()) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) todo.emplace_back(i, j);
    }
    const Eigen::MatrixXd rp = resistance_matrix(split.plus);
    const Eigen::MatrixXd rm = resistance_matrix(split.minus);
    ResistancePairResult out;
    double best_ratio = 0.0;
    for (const auto& [i, j] : todo) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw Error(ErrorCode::IndexOutOfRange, "resistance pair");
        const double r_plus = rp(i, j);
        const double r_minus = rm(i, j);
        if (std::isinf(r_plus)) continue;
        ++out.pairs_checked;
        const double ratio = std::isinf(r_minus) ? std::numeric_limits<double>::infinity() : r_minus / r_plus;
        const bool fires = ratio > 1.0 + resistance_pair_margin;
        if (out.i < 0 || (fires && ratio > best_ratio) || (out.outcome != Outcome::Unstable && ratio > best_ratio)) {
            if (fires || out.outcome != Outcome::Unstable) {
                out.i = i;
                out.j = j;
                out.r_plus = r_plus;
                out.r_minus = r_minus;
                best_ratio = ratio;
                if (fires) out.outcome = Outcome::Unstable;
            }
        }
    }
    return out;
}

StabilityVerdict tree_verdict(const System& s, const Equilibrium& eq, double tol_zero) {
    if (!s.graph().is_tree()) throw Error(ErrorCode::NotATree, "graph has a cycle or is disconnected");
    const Eigen::VectorXd df = edge_derivatives(s, eq.x);
    int plus = 0;
    int minus = 0;
    int zero = 0;
    for (Eigen::Index e = 0; e < df.size(); ++e) {
        if (df(e) > default_zero_derivative) ++plus;
        else if (df(e) < -default_zero_derivative) ++minus;
        else ++zero;
    }
    StabilityVerdict out = spectral_verdict(jacobian(s, eq.x), tol_zero);
    out.evidence.clear();
    const Verdict closed = plus > 0 ? Verdict::Unstable : (zero > 0 ? Verdict::Inconclusive : Verdict::Stable);
    const Inertia signs{plus, minus, zero};
    out.evidence.push_back({"tree_closed_form", "edge derivative signs " + fmt(signs) + " equal the spectrum signs",
                            to_string(closed)});
    out.evidence.push_back({"tree_sign_check", "derivative signs " + fmt(signs) + " vs spectrum inertia " + fmt(out.inertia),
                            signs == out.inertia ? "agree" : "disagree"});
    out.evidence.push_back(spectral_evidence(out));
    out.verdict = closed;
    return out;
}

StabilityVerdict cycle_verdict(const System& s, const Equilibrium& eq, double tol_zero) {
    if (!s.graph().is_cycle()) throw Error(ErrorCode::NotACycle, "graph is not a cycle");
    const Eigen::VectorXd df = edge_derivatives(s, eq.x);
    std::vector<int> nonnegative;
    int plus = 0;
    for (Eigen::Index e = 0; e < df.size(); ++e) {
        if (df(e) >= -default_zero_derivative) nonnegative.push_back(static_cast<int>(e));
        if (df(e) > default_zero_derivative) ++plus;
    }
    StabilityVerdict out = spectral_verdict(jacobian(s, eq.x), tol_zero);
    out.evidence.clear();
    Verdict closed = Verdict::Inconclusive;
    std::string detail;
    if (nonnegative.empty()) {
        closed = Verdict::Stable;
        detail = "every edge derivative is negative";
    } else if (nonnegative.size() >= 2) {
        closed = plus > 0 ? Verdict::Unstable : Verdict::Inconclusive;
        detail = std::to_string(nonnegative.size()) + " edges with f' >= 0, " + std::to_string(plus) + " positive";
    } else {
        const int e = nonnegative.front();
        if (df(e) <= default_zero_derivative) {
            detail = "single edge with f' = 0";
        } else {
            double series = 0.0;
            for (Eigen::Index o = 0; o < df.size(); ++o)
                if (o != e) series += 1.0 / std::abs(df(o));
            const double rho = df(e) * series;
            closed = rho < 1.0 - rho_margin ? Verdict::Stable
                                             : (rho > 1.0 + rho_margin ? Verdict::Unstable : Verdict::Inconclusive);
            detail = "edge " + std::to_string(e + 1) + ": rho = f' * sum 1/|f'_other| = " + fmt(rho) +
                     (closed == Verdict::Inconclusive ? " (boundary)" : "");
        }
    }
    out.evidence.push_back({"cycle_closed_form", detail, to_string(closed)});
    out.evidence.push_back(spectral_evidence(out));
    out.verdict = closed;
    return out;
}

CliqueThresholds clique_thresholds(double d0, double da) {
    const double denom = d0 + std::abs(da);
    return {d0 / denom, std::abs(da) / denom};
}

std::vector<double> kn_eigenvalues(int n, int n0, double d0, double da) {
    if (n < 2 || n0 < 1 || n0 > n - 1) throw Error(ErrorCode::InvalidArgument, "need 1 <= n0 <= n-1");
    std::vector<double> out{0.0, da * n};
    for (int i = 0; i < n0 - 1; ++i) out.push_back((d0 - da) * n0 + da * n);
    for (int i = 0; i < n - n0 - 1; ++i) out.push_back((da - d0) * n0 + d0 * n);
    std::sort(out.begin(), out.end());
    return out;
}

StabilityVerdict clique_verdict(double d0, double da, int n, int n0) {
    if (n < 3 || n0 < 0 || n0 > n) throw Error(ErrorCode::InvalidArgument, "clique verdict needs n >= 3, 0 <= n0 <= n");
    const bool origin = n0 == 0 || n0 == n;
    if (std::abs(d0) <= default_zero_derivative || (!origin && std::abs(da) <= default_zero_derivative)) {
        throw Error(ErrorCode::BadDerivativeSigns, "f'(0) = " + fmt(d0) + ", f'(alpha) = " + fmt(da));
    }
    std::vector<double> full;
    if (origin) {
        full.assign(static_cast<std::size_t>(n), d0 * n);
        full[0] = 0.0;
        std::sort(full.begin(), full.end());
    } else {
        full = kn_eigenvalues(n, n0, d0, da);
    }
    StabilityVerdict out = verdict_from_full_spectrum(Eigen::Map<const Eigen::VectorXd>(full.data(), n), default_tol_zero);

    Verdict closed = Verdict::Inconclusive;
    std::string detail;
    if (origin) {
        closed = d0 < 0.0 ? Verdict::Stable : Verdict::Unstable;
        detail = "origin: every edge at 0 with f'(0) = " + fmt(d0);
    } else if (d0 > 0.0 && da > 0.0) {
        closed = Verdict::Unstable;
        detail = "f'(0) > 0 and f'(alpha) > 0";
    } else if (d0 < 0.0 && da < 0.0) {
        closed = Verdict::Stable;
        detail = "f'(0) < 0 and f'(alpha) < 0";
    } else if (d0 < 0.0 && da > 0.0) {
        closed = Verdict::Unstable;
        detail = "f'(0) < 0 < f'(alpha) with 0 < n0 < n";
    } else {
        const auto [a, b] = clique_thresholds(d0, da);
        const double ratio = static_cast<double>(n0) / n;
        constexpr double edge = 1e-12;
        if (ratio > a + edge && ratio < b - edge) closed = Verdict::Stable;
        else if (ratio < a - edge || ratio > b + edge) closed = Verdict::Unstable;
        detail = "a = " + fmt(a) + ", b = " + fmt(b) + ", n0/n = " + fmt(ratio) +
                 (closed == Verdict::Inconclusive ? " (boundary)" : "");
    }
    out.evidence.push_back({"clique_closed_form", detail, to_string(closed)});
    out.evidence.push_back({"clique_eigenvalues", "closed-form spectrum " + fmt_values(out.spectrum), to_string(out.verdict)});
    out.verdict = closed;
    return out;
}

StabilityVerdict clique_verdict(const CouplingFunction& f, double alpha, int n, int n0) {
    return clique_verdict(f.derivative(0.0), f.derivative(alpha), n, n0);
}

bool on_cycle_family(const System& s, const Equilibrium& eq, double bound) {
    const Graph& g = s.graph();
    if (!g.is_cycle() || !s.assignment().is_uniform() || !s.coupling(0).is_polynomial()) return false;
    const CouplingFunction& f = s.coupling(0);
    const int k = f.degree();
    const int n = g.node_count();
    if (k < 3 || n % k != 0) return false;
    const auto order = cycle_order(g);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        z[static_cast<std::size_t>(i)] = eq.x(order[static_cast<std::size_t>((i + 1) % n)]) - eq.x(order[static_cast<std::size_t>(i)]);
    }
    const double mu = f.eval(z[0]);
    for (double zi : z) {
        if (std::abs(f.eval(zi) - mu) > 1e-8 * (1.0 + std::abs(mu))) return false;
    }
    const auto beta = roots_shifted(f, mu, bound);
    if (static_cast<int>(beta.size()) != k) return false;
    for (double b : beta) {
        if (is_degenerate_root(f, b)) return false;
    }
    std::sort(z.begin(), z.end());
    for (int i = 0; i < n; ++i) {
        const double expected = beta[static_cast<std::size_t>(i / (n / k))];
        if (std::abs(z[static_cast<std::size_t>(i)] - expected) > 1e-6 * (1.0 + std::abs(expected))) return false;
    }
    return true;
}

namespace {

// (n0, alpha) when x takes two values a distance alpha apart with alpha a
// positive root, or the origin (n0 = n).
std::optional<std::pair<int, double>> clique_form(const System& s, const Equilibrium& eq, double bound) {
    const int n = s.node_count();
    const double lo = eq.x.minCoeff();
    const double hi = eq.x.maxCoeff();
    constexpr double tol = 1e-7;
    if (hi - lo <= tol) return std::make_pair(n, 0.0);
    int n0 = 0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(eq.x(i) - lo) <= tol) ++n0;
        else if (std::abs(eq.x(i) - hi) > tol) return std::nullopt;
    }
    const double alpha = hi - lo;
    for (double r : positive_roots(roots(s.coupling(0), bound))) {
        if (std::abs(r - alpha) <= tol * (1.0 + r)) return std::make_pair(n0, r);
    }
    return std::nullopt;
}

void append(std::vector<Evidence>& to, const std::vector<Evidence>& from, const std::string& prefix) {
    for (const auto& e : from) to.push_back({prefix + e.criterion, e.detail, e.conclusion});
}

std::optional<StabilityVerdict> closed_form(const System& s, const Equilibrium& eq, const ClassifyOptions& options) {
    const Graph& g = s.graph();
    if (g.is_tree() && g.node_count() >= 2) return tree_verdict(s, eq, options.tol_zero);
    if (g.is_cycle()) return cycle_verdict(s, eq, options.tol_zero);
    if (g.is_complete() && g.node_count() >= 3 && s.assignment().is_uniform()) {
        if (const auto form = clique_form(s, eq, options.root_bound)) {
            try {
                return clique_verdict(s.coupling(0), form->second, g.node_count(), form->first);
            } catch (const Error& err) {
                if (err.code() != ErrorCode::BadDerivativeSigns) throw;
            }
        }
    }
    return std::nullopt;
}

struct Ladder {
    std::vector<Evidence> evidence;
    std::vector<std::pair<std::string, Verdict>> decisive;
};

void record(Ladder& ladder, const std::string& name, const std::string& detail, Outcome outcome) {
    ladder.evidence.push_back({name, detail, to_string(outcome)});
    if (to_verdict(outcome) != Verdict::Inconclusive) ladder.decisive.emplace_back(name, to_verdict(outcome));
}

void run_resistance_criteria(Ladder& ladder, const SignedSplit& split, const std::string& prefix) {
    const OneEdgeResult one = one_edge_resistance_test(split);
    std::string detail = "not applicable";
    if (one.outcome != Outcome::NotApplicable) {
        detail = "edge (" + std::to_string(split.graph.edge(one.edge).u + 1) + "," +
                 std::to_string(split.graph.edge(one.edge).v + 1) + "): f' = " + fmt(one.derivative) +
                 ", r- = " + fmt(one.r_minus) + ", rho = " + fmt(one.rho);
    }
    record(ladder, prefix + "one_edge_resistance", detail, one.outcome);
    try {
        const MultiEdgeResult multi = multi_edge_resistance_test(split);
        record(ladder, prefix + "multi_edge_resistance",
               "sum f' r- = " + fmt(multi.sum) + ", max term = " + fmt(multi.max_term), multi.outcome);
    } catch (const Error& err) {
        if (err.code() != ErrorCode::DisconnectedUnion) throw;
        record(ladder, prefix + "multi_edge_resistance", err.what(), Outcome::NotApplicable);
    }
}

Ladder run_ladder(const SignedSplit& split, double tol_zero) {
    Ladder ladder;
    const ConnectivityResult conn = connectivity_test(split);
    std::string detail = "G- components " + std::to_string(conn.minus_components) + ", |G+| = " +
                         std::to_string(split.plus_edges.size());
    if (conn.bridging_plus_edge) detail += ", G+ edge " + std::to_string(*conn.bridging_plus_edge + 1) + " joins two of them";
    record(ladder, "connectivity", detail, conn.outcome);

    const CutSetResult cut = cut_set_scan(split);
    record(ladder, "cut_set", cut.description + ": sum f' = " + fmt(cut.sum), cut.outcome);

    if (split.minus.component_count == 1) {
        const SchurReduction red = schur_reduce(split, tol_zero);
        bool conserved = true;
        for (const auto& step : red.steps) conserved = conserved && step.inertia_before == step.inertia_after + step.inertia_block;
        std::string removed;
        for (const auto& step : red.steps) removed += (removed.empty() ? "" : ",") + std::to_string(step.removed + 1);
        ladder.evidence.push_back({"schur_reduce",
                                   std::to_string(split.graph.node_count()) + " -> " + std::to_string(red.reduced.rows()) +
                                       " nodes" + (removed.empty() ? "" : " removing " + removed) +
                                       ", inertia conserved at every step: " + (conserved ? "yes" : "no"),
                                   conserved ? "reduced" : "inertia mismatch"});
        if (!red.steps.empty()) {
            const ConnectivityResult rc = connectivity_test(red.reduced_split);
            record(ladder, "schur/connectivity", "reduced G- components " + std::to_string(rc.minus_components), rc.outcome);
            run_resistance_criteria(ladder, red.reduced_split, "schur/");
        }
    }
    run_resistance_criteria(ladder, split, "");

    const ResistancePairResult pair = resistance_pair_test(split);
    std::string pd = std::to_string(pair.pairs_checked) + " pairs with finite r+";
    if (pair.i >= 0) {
        pd += "; pair (" + std::to_string(pair.i + 1) + "," + std::to_string(pair.j + 1) + "): r+ = " + fmt(pair.r_plus) +
              ", r- = " + fmt(pair.r_minus);
    }
    record(ladder, "resistance_pair", pd, pair.outcome);
    return ladder;
}

Verdict combine(const std::vector<Verdict>& parts) {
    if (std::find(parts.begin(), parts.end(), Verdict::Unstable) != parts.end()) return Verdict::Unstable;
    if (std::all_of(parts.begin(), parts.end(), [](Verdict v) { return v == Verdict::Stable; })) return Verdict::Stable;
    return Verdict::Inconclusive;
}

}  // namespace

StabilityVerdict classify(const System& s, const Equilibrium& eq, const ClassifyOptions& options) {
    if (eq.x.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "equilibrium size != node count");
    const double residual = vector_field(s, eq.x).norm();
    if (residual > 1e-8) throw Error(ErrorCode::InvalidArgument, "not an equilibrium: residual " + fmt(residual));

    const Eigen::MatrixXd j = jacobian(s, eq.x);
    const StabilityVerdict spectral = spectral_verdict(j, options.tol_zero);
    StabilityVerdict out;
    out.spectrum = spectral.spectrum;
    out.inertia = spectral.inertia;

    std::vector<std::pair<std::string, Verdict>> decisive;
    std::optional<Verdict> block_verdict;

    const Graph& g = s.graph();
    if (options.use_blocks && g.connected() && g.node_count() >= 2) {
        const BlockDecomposition dec = block_decomposition(g);
        if (dec.blocks.size() > 1) {
            std::vector<Verdict> parts;
            Inertia block_sum;
            ClassifyOptions inner = options;
            inner.use_blocks = false;
            for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
                const Subgraph sub = extract_block(g, dec.blocks[b]);
                const System bs = block_system(s, sub);
                Eigen::VectorXd y_local(static_cast<Eigen::Index>(sub.edges.size()));
                for (std::size_t i = 0; i < sub.edges.size(); ++i) y_local(static_cast<Eigen::Index>(i)) = eq.y(sub.edges[i]);
                const Equilibrium local = make_equilibrium(bs, node_from_edges(sub.graph, y_local), eq.provenance);
                const StabilityVerdict bv = classify(bs, local, inner);
                parts.push_back(bv.verdict);
                block_sum += bv.inertia;
                std::string nodes;
                for (int v : sub.nodes) nodes += (nodes.empty() ? "" : ",") + std::to_string(v + 1);
                const std::string prefix = "block " + std::to_string(b + 1) + " " + to_string(dec.blocks[b].kind) + "{" + nodes + "}/";
                append(out.evidence, bv.evidence, prefix);
                out.evidence.push_back({prefix + "verdict", "", to_string(bv.verdict)});
            }
            block_verdict = combine(parts);
            out.evidence.push_back({"blocks", "block inertia sum " + fmt(block_sum) + " vs whole-graph inertia " + fmt(out.inertia),
                                    block_sum == out.inertia ? "agree" : "disagree"});
            out.evidence.push_back({"blocks/combined", std::to_string(dec.blocks.size()) + " blocks", to_string(*block_verdict)});
            decisive.emplace_back("blocks/combined", *block_verdict);
        }
    }

    if (const auto cf = closed_form(s, eq, options)) {
        for (const auto& e : cf->evidence) {
            if (e.criterion != "spectral") out.evidence.push_back(e);
        }
        if (cf->verdict != Verdict::Inconclusive) decisive.emplace_back(cf->evidence.front().criterion, cf->verdict);
    }

    const SignedSplit split = signed_split(s, eq.x, options.zero_derivative);
    Ladder ladder = run_ladder(split, options.tol_zero);
    out.evidence.insert(out.evidence.end(), ladder.evidence.begin(), ladder.evidence.end());
    decisive.insert(decisive.end(), ladder.decisive.begin(), ladder.decisive.end());

    out.evidence.push_back(spectral_evidence(spectral));
    out.verdict = spectral.verdict;

    if (out.verdict == Verdict::Inconclusive) {
        if (block_verdict == Verdict::Stable) {
            out.verdict = Verdict::Stable;
            out.evidence.push_back({"final", "every block is stable; the zero directions are those of the blocks", "Stable"});
        } else if (out.inertia.zero == 1 && out.inertia.plus == 0 && on_cycle_family(s, eq, options.root_bound)) {
            out.verdict = Verdict::Stable;
            out.evidence.push_back({"cycle_family_curve",
                                    "on a curve of equilibria; the single zero eigenvalue is tangent to it and the rest "
                                    "are negative (normally attracting)",
                                    "Stable"});
        }
    }

    std::string conflicts;
    for (const auto& [name, v] : decisive) {
        if (out.verdict != Verdict::Inconclusive && v != out.verdict) conflicts += (conflicts.empty() ? "" : ", ") + name;
    }
    out.evidence.push_back({"consistency",
                            conflicts.empty() ? std::to_string(decisive.size()) + " decisive criteria agree with the final verdict"
                                              : "disagreeing: " + conflicts,
                            conflicts.empty() ? "agree" : "disagree"});
    return out;
}

}  // namespace conlab
