#include "conlab/dynamics.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace conlab {

CouplingAssignment CouplingAssignment::uniform(CouplingFunction f) {
    CouplingAssignment a;
    a.uniform_ = true;
    a.functions_ = {std::move(f)};
    return a;
}

CouplingAssignment CouplingAssignment::per_edge(std::vector<CouplingFunction> functions) {
    CouplingAssignment a;
    a.uniform_ = false;
    a.functions_ = std::move(functions);
    return a;
}

const CouplingFunction& CouplingAssignment::at(int edge) const {
    if (uniform_) return functions_.front();
    if (edge < 0 || edge >= static_cast<int>(functions_.size())) {
        throw Error(ErrorCode::IndexOutOfRange, "no coupling for edge " + std::to_string(edge));
    }
    return functions_[static_cast<std::size_t>(edge)];
}

System::System(Graph graph, CouplingAssignment coupling)
    : graph_(std::move(graph)), d_(incidence_matrix(graph_)), coupling_(std::move(coupling)) {
    if (!coupling_.covers(graph_.edge_count())) {
        throw Error(ErrorCode::InvalidCoupling, "per-edge coupling does not cover all " +
                                                    std::to_string(graph_.edge_count()) + " edges");
    }
}

Eigen::VectorXd mean_zero(const Eigen::VectorXd& x) {
    if (x.size() == 0) return x;
    return x.array() - x.mean();
}

Eigen::VectorXd edge_coordinates(const Graph& g, const Eigen::VectorXd& x) {
    if (x.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "state length != node count");
    Eigen::VectorXd y(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) y(e) = x(g.edge(e).v) - x(g.edge(e).u);
    return y;
}

Eigen::VectorXd node_from_edges(const Graph& g, const Eigen::VectorXd& y) {
    if (y.size() != g.edge_count()) throw Error(ErrorCode::InvalidArgument, "edge vector length != edge count");
    const Eigen::MatrixXd d = incidence_matrix(g);
    const Eigen::MatrixXd l = d * d.transpose();
    return mean_zero(pseudoinverse(l) * (d * y));
}

double cut_space_residual(const Graph& g, const Eigen::VectorXd& y) {
    double worst = 0.0;
    for (const auto& c : cycle_space_basis(g)) worst = std::max(worst, std::abs(c.dot(y)) / c.norm());
    return worst;
}

Eigen::VectorXd vector_field(const System& s, const Eigen::VectorXd& x) {
    const Graph& g = s.graph();
    if (x.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "state length != node count");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        for (const auto& [j, e] : g.neighbors(i)) out(i) += s.coupling(e).eval(x(i) - x(j));
    }
    return out;
}

Eigen::VectorXd vector_field_matrix(const System& s, const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = s.incidence().transpose() * x;
    Eigen::VectorXd fy(y.size());
    for (Eigen::Index e = 0; e < y.size(); ++e) fy(e) = s.coupling(static_cast<int>(e)).eval(y(e));
    return s.incidence() * fy;
}

Eigen::VectorXd edge_vector_field(const System& s, const Eigen::VectorXd& y) {
    if (y.size() != s.edge_count()) throw Error(ErrorCode::InvalidArgument, "edge vector length != edge count");
    const double residual = cut_space_residual(s.graph(), y);
    if (residual > 1e-8) {
        throw Error(ErrorCode::NotInCutSpace, "cycle projection " + std::to_string(residual));
    }
    Eigen::VectorXd fy(y.size());
    for (Eigen::Index e = 0; e < y.size(); ++e) fy(e) = s.coupling(static_cast<int>(e)).eval(y(e));
    return s.incidence().transpose() * (s.incidence() * fy);
}

Eigen::VectorXd edge_derivatives(const System& s, const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = edge_coordinates(s.graph(), x);
    Eigen::VectorXd df(y.size());
    for (Eigen::Index e = 0; e < y.size(); ++e) df(e) = s.coupling(static_cast<int>(e)).derivative(y(e));
    return df;
}

Eigen::MatrixXd jacobian(const System& s, const Eigen::VectorXd& x) {
    const Eigen::VectorXd df = edge_derivatives(s, x);
    return s.incidence() * df.asDiagonal() * s.incidence().transpose();
}

SignedSplit split_from_derivatives(const Graph& g, const Eigen::VectorXd& derivatives, double zero_tol) {
    if (derivatives.size() != g.edge_count()) throw Error(ErrorCode::InvalidArgument, "derivative vector length");
    SignedSplit out;
    out.graph = g;
    out.derivatives = derivatives;
    Eigen::VectorXd wp = Eigen::VectorXd::Zero(g.edge_count());
    Eigen::VectorXd wm = Eigen::VectorXd::Zero(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const double df = derivatives(e);
        if (!std::isfinite(df)) throw Error(ErrorCode::NonFinite, "edge derivative");
        if (df > zero_tol) {
            out.plus_edges.push_back(e);
            wp(e) = df;
        } else if (df < -zero_tol) {
            out.minus_edges.push_back(e);
            wm(e) = -df;
        } else {
            out.zero_edges.push_back(e);
        }
    }
    out.plus = laplacian_from_weights(g, wp);
    out.minus = laplacian_from_weights(g, wm);
    return out;
}

SignedSplit signed_split(const System& s, const Eigen::VectorXd& x_star, double zero_tol) {
    return split_from_derivatives(s.graph(), edge_derivatives(s, x_star), zero_tol);
}

bool has_potential(const System& s) {
    for (int e = 0; e < s.edge_count(); ++e) {
        if (!s.coupling(e).has_antiderivative()) return false;
    }
    return true;
}

double potential(const System& s, const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = edge_coordinates(s.graph(), x);
    double v = 0.0;
    for (Eigen::Index e = 0; e < y.size(); ++e) v -= s.coupling(static_cast<int>(e)).antiderivative(y(e));
    return v;
}

Trajectory integrate(const System& s, const Eigen::VectorXd& x0, double t_end, const IntegrateOptions& options) {
    if (!(options.dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt and t_end must be positive");
    if (x0.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "x0 length != node count");
    if (!x0.allFinite()) throw Error(ErrorCode::NonFinite, "x0");

    Trajectory traj;
    traj.potential_tracked = has_potential(s);
    const double mean0 = x0.size() ? x0.mean() : 0.0;
    const auto steps = static_cast<long>(std::ceil(t_end / options.dt - 1e-9));
    const int every = std::max(1, options.sample_every);

    Eigen::VectorXd x = x0;
    double v_prev = traj.potential_tracked ? potential(s, x) : 0.0;
    traj.t.push_back(0.0);
    traj.x.push_back(x);

    for (long step = 1; step <= steps; ++step) {
        const double h = std::min(options.dt, t_end - options.dt * static_cast<double>(step - 1));
        const Eigen::VectorXd k1 = vector_field(s, x);
        const Eigen::VectorXd k2 = vector_field(s, x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = vector_field(s, x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = vector_field(s, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = step == steps ? t_end : options.dt * static_cast<double>(step);

        if (!x.allFinite() || x.norm() > options.blowup_norm) {
            traj.blew_up = true;
            traj.t.push_back(t);
            traj.x.push_back(x);
            return traj;
        }
        const double drift = std::abs((x.size() ? x.mean() : 0.0) - mean0);
        traj.max_mean_drift = std::max(traj.max_mean_drift, drift);
        traj.max_mean_drift_ratio = std::max(traj.max_mean_drift_ratio, drift / (1.0 + t));
        if (traj.potential_tracked) {
            const double v = potential(s, x);
            traj.max_potential_increase = std::max(traj.max_potential_increase, v - v_prev);
            v_prev = v;
        }
        if (step % every == 0 || step == steps) {
            traj.t.push_back(t);
            traj.x.push_back(x);
        }
    }
    return traj;
}

const char* to_string(Boundedness b) noexcept {
    switch (b) {
        case Boundedness::RadiallyUnbounded: return "RadiallyUnbounded";
        case Boundedness::NegativeTail: return "NegativeTail";
        case Boundedness::Unknown: return "Unknown";
    }
    return "Unknown";
}

namespace {

Boundedness edge_certificate(const CouplingFunction& f) {
    if (f.is_polynomial()) {
        const int deg = f.degree();
        if (deg <= 0) return Boundedness::Unknown;
        const double lead = f.odd_coefficients()[static_cast<std::size_t>((deg - 1) / 2)];
        return lead < 0.0 ? Boundedness::NegativeTail : Boundedness::Unknown;
    }
    if (f.kind() == CouplingKind::Custom && f.has_antiderivative()) {
        // -F sampled on a geometric tail; must be positive and growing.
        double previous = 0.0;
        for (double y = 1e2; y <= 1e4; y *= 10.0) {
            const double tail = -std::min(f.antiderivative(y), f.antiderivative(-y));
            if (!std::isfinite(tail) || tail <= previous) return Boundedness::Unknown;
            previous = tail;
        }
        return Boundedness::RadiallyUnbounded;
    }
    return Boundedness::Unknown;
}

}  // namespace

Boundedness boundedness_certificate(const System& s) {
    bool all_negative_tail = true;
    bool all_unbounded = true;
    for (int e = 0; e < s.edge_count(); ++e) {
        const Boundedness b = edge_certificate(s.coupling(e));
        if (b == Boundedness::Unknown) return Boundedness::Unknown;
        all_negative_tail = all_negative_tail && b == Boundedness::NegativeTail;
        all_unbounded = all_unbounded && b != Boundedness::Unknown;
    }
    if (all_negative_tail) return Boundedness::NegativeTail;
    return all_unbounded ? Boundedness::RadiallyUnbounded : Boundedness::Unknown;
}

}  // namespace conlab
