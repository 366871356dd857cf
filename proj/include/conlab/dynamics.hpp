#pragma once

// The network system x' = d f(d^T x): node and edge vector fields, the
// Jacobian d diag(f') d^T and its split into L+ - L-, the gradient potential,
// and a fixed-step RK4 integrator.

#include "conlab/coupling.hpp"
#include "conlab/graph.hpp"
#include "conlab/linalg.hpp"

#include <Eigen/Dense>

#include <vector>

namespace conlab {

class CouplingAssignment {
public:
    static CouplingAssignment uniform(CouplingFunction f);
    /// One function per edge index.
    static CouplingAssignment per_edge(std::vector<CouplingFunction> functions);

    [[nodiscard]] bool is_uniform() const noexcept { return uniform_; }
    [[nodiscard]] const CouplingFunction& at(int edge) const;
    [[nodiscard]] bool covers(int edge_count) const noexcept {
        return uniform_ || static_cast<int>(functions_.size()) == edge_count;
    }

private:
    bool uniform_ = true;
    std::vector<CouplingFunction> functions_;
};

class System {
public:
    /// Throws InvalidCoupling when a per-edge assignment does not cover every edge.
    System(Graph graph, CouplingAssignment coupling);

    [[nodiscard]] const Graph& graph() const noexcept { return graph_; }
    [[nodiscard]] const Eigen::MatrixXd& incidence() const noexcept { return d_; }
    [[nodiscard]] const CouplingAssignment& assignment() const noexcept { return coupling_; }
    [[nodiscard]] const CouplingFunction& coupling(int edge) const { return coupling_.at(edge); }
    [[nodiscard]] int node_count() const noexcept { return graph_.node_count(); }
    [[nodiscard]] int edge_count() const noexcept { return graph_.edge_count(); }

private:
    Graph graph_;
    Eigen::MatrixXd d_;
    CouplingAssignment coupling_;
};

/// x - mean(x) 1.
[[nodiscard]] Eigen::VectorXd mean_zero(const Eigen::VectorXd& x);

/// y = d^T x, i.e. y_e = x_v - x_u for edge (u, v).
[[nodiscard]] Eigen::VectorXd edge_coordinates(const Graph& g, const Eigen::VectorXd& x);

/// Mean-zero x with d^T x = y (least squares through L^+ d y).
[[nodiscard]] Eigen::VectorXd node_from_edges(const Graph& g, const Eigen::VectorXd& y);

/// Largest |<y, c>| / |c| over the cycle basis, 0 for trees.
[[nodiscard]] double cut_space_residual(const Graph& g, const Eigen::VectorXd& y);

/// x'_i = sum over neighbours j of f_ij(x_i - x_j).
[[nodiscard]] Eigen::VectorXd vector_field(const System& s, const Eigen::VectorXd& x);
/// The same field assembled as d f(d^T x).
[[nodiscard]] Eigen::VectorXd vector_field_matrix(const System& s, const Eigen::VectorXd& x);

/// y' = d^T d f(y) for y in the cut space. Throws NotInCutSpace.
[[nodiscard]] Eigen::VectorXd edge_vector_field(const System& s, const Eigen::VectorXd& y);

/// f'_e(y_e) per edge at the node state x.
[[nodiscard]] Eigen::VectorXd edge_derivatives(const System& s, const Eigen::VectorXd& x);

[[nodiscard]] Eigen::MatrixXd jacobian(const System& s, const Eigen::VectorXd& x);

/// J = L+ - L-. G+ holds edges with f' > tol (weight f'), G- edges with
/// f' < -tol (weight |f'|); the rest are listed as zero edges.
struct SignedSplit {
    Graph graph;
    Eigen::VectorXd derivatives;
    std::vector<int> plus_edges;
    std::vector<int> minus_edges;
    std::vector<int> zero_edges;
    WeightedLaplacian<double> plus;
    WeightedLaplacian<double> minus;

    [[nodiscard]] Eigen::MatrixXd jacobian() const { return plus.matrix - minus.matrix; }
};

inline constexpr double default_zero_derivative = 1e-12;

[[nodiscard]] SignedSplit split_from_derivatives(const Graph& g, const Eigen::VectorXd& derivatives,
                                                 double zero_tol = default_zero_derivative);
[[nodiscard]] SignedSplit signed_split(const System& s, const Eigen::VectorXd& x_star,
                                       double zero_tol = default_zero_derivative);

/// V(x) = -sum F_e(y_e). Throws NotAvailable.
[[nodiscard]] double potential(const System& s, const Eigen::VectorXd& x);
[[nodiscard]] bool has_potential(const System& s);

struct IntegrateOptions {
    double dt = 1e-3;
    int sample_every = 1;  // steps between stored samples; the final state is always stored
    double blowup_norm = 1e8;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> x;
    bool blew_up = false;
    double max_mean_drift = 0.0;          // max |mean(x(t)) - mean(x0)|
    double max_mean_drift_ratio = 0.0;    // max |drift| / (1 + t)
    double max_potential_increase = 0.0;  // max per-step V increase; 0 when V is unavailable
    bool potential_tracked = false;

    [[nodiscard]] const Eigen::VectorXd& final_state() const { return x.back(); }
};

/// Classical RK4. Stops early with blew_up set once |x| exceeds the guard or
/// turns non-finite; the trajectory up to that point is kept.
[[nodiscard]] Trajectory integrate(const System& s, const Eigen::VectorXd& x0, double t_end,
                                   const IntegrateOptions& options = {});

enum class Boundedness { RadiallyUnbounded, NegativeTail, Unknown };

[[nodiscard]] const char* to_string(Boundedness b) noexcept;

/// NegativeTail when every edge has y f(y) -> -inf (polynomial leading
/// coefficient negative), RadiallyUnbounded when every -F_e -> +inf
/// without that, Unknown otherwise.
[[nodiscard]] Boundedness boundedness_certificate(const System& s);

}  // namespace conlab
