#pragma once

// Equilibrium enumeration: detailed-balance states (every edge difference is a
// root of its coupling), closed forms for trees, cycles and cliques, the
// product over blocks joined at cut-nodes, and Newton refinement.

#include "conlab/dynamics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conlab {

enum class Provenance { DetailedBalance, CycleFamily, CliqueForm, Composed, Refined };

[[nodiscard]] const char* to_string(Provenance p) noexcept;

struct Equilibrium {
    Eigen::VectorXd x;  // mean-zero node state
    Eigen::VectorXd y;  // d^T x
    Provenance provenance = Provenance::DetailedBalance;
    double lambda = 0.0;  // CycleFamily
    int n0 = -1;          // CliqueForm: number of nodes at 0
    double alpha = 0.0;   // CliqueForm
    double residual = 0.0;
    bool incomplete = false;       // clique root set not additive-open
    std::vector<int> edge_signs;   // sign of f'_e(y_e); filled for trees

    /// e.g. "CliqueForm(n0=2,alpha=1)".
    [[nodiscard]] std::string label() const;
};

/// Mean-zero representative, y and residual for an arbitrary state.
[[nodiscard]] Equilibrium make_equilibrium(const System& s, const Eigen::VectorXd& x,
                                           Provenance provenance = Provenance::DetailedBalance);

struct EnumerationOptions {
    double bound = 10.0;
    double max_states = 1e6;
    RootOptions roots;
};

/// All states with every y_e a root of f_e within the bound. Values are
/// assigned on a spanning tree and each chord is checked against its root
/// set, which is the cut-space test. Throws CombinatorialBlowup when the
/// number of tree assignments exceeds max_states.
[[nodiscard]] std::vector<Equilibrium> detailed_balance(const System& s, const EnumerationOptions& options = {});

/// Every root combination, with per-edge derivative signs. Throws NotATree.
[[nodiscard]] std::vector<Equilibrium> tree_equilibria(const System& s, const EnumerationOptions& options = {});

/// Equilibria with z_i = x_{v(i+1)} - x_{v(i)} = beta_{i mod k}(lambda),
/// beta the sorted roots of f - lambda, valid for lambda in (lambda_min, lambda_max).
class EquilibriumFamily {
public:
    EquilibriumFamily(System system, std::vector<int> order, int k, double epsilon, double bound);

    [[nodiscard]] double lambda_min() const noexcept { return -0.99 * epsilon_; }
    [[nodiscard]] double lambda_max() const noexcept { return 0.99 * epsilon_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] int root_count() const noexcept { return k_; }
    [[nodiscard]] const std::vector<int>& order() const noexcept { return order_; }

    /// Cycle-ordered differences z at lambda. Throws InvalidArgument outside the interval.
    [[nodiscard]] Eigen::VectorXd z(double lambda) const;
    [[nodiscard]] Equilibrium at(double lambda) const;
    /// `count` evenly spaced members across the open interval.
    [[nodiscard]] std::vector<Equilibrium> sample(int count) const;

private:
    System system_;
    std::vector<int> order_;
    int k_;
    double epsilon_;
    double bound_;
};

struct CycleFamilyResult {
    std::optional<EquilibriumFamily> family;
    std::string explanation;
};

/// Throws NotACycle or NotPolynomial (uniform odd polynomial coupling required).
[[nodiscard]] CycleFamilyResult cycle_family(const System& s, double bound = 10.0);

/// States (0,...,0,alpha,...,alpha) on K_n with n0 zeros, for every positive
/// root alpha and n0 = 1..n-1, plus the origin once. Tagged incomplete when
/// the positive roots are not additive-open.
[[nodiscard]] std::vector<Equilibrium> clique_equilibria(const CouplingFunction& f, int n, double bound = 10.0);

/// Lazy product of per-block equilibria. Entry i of `block_edge_values` lists
/// the edge-coordinate equilibria of block i in block-local edge order.
class CoalescenceProduct {
public:
    CoalescenceProduct(const Graph& g, const BlockDecomposition& decomposition,
                       std::vector<std::vector<Eigen::VectorXd>> block_edge_values);

    /// Saturates at UINT64_MAX.
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
    [[nodiscard]] bool empty() const noexcept { return count_ == 0; }
    /// Mixed-radix index, block 0 varying slowest.
    [[nodiscard]] Eigen::VectorXd edge_values(std::uint64_t index) const;
    [[nodiscard]] std::vector<int> choice(std::uint64_t index) const;
    [[nodiscard]] Equilibrium equilibrium(const System& s, std::uint64_t index) const;

private:
    Graph graph_;
    BlockDecomposition decomposition_;
    std::vector<std::vector<Eigen::VectorXd>> values_;
    std::uint64_t count_ = 0;
};

[[nodiscard]] CoalescenceProduct compose_coalescence(const Graph& g, const BlockDecomposition& decomposition,
                                                     std::vector<std::vector<Eigen::VectorXd>> block_edge_values);

/// The system restricted to one block (local indices as in extract_block).
[[nodiscard]] System block_system(const System& s, const Subgraph& block);

struct RefineOptions {
    int max_iter = 100;
    double tolerance = 1e-10;
};

/// Damped Newton on the mean-zero plane with a pseudoinverse step.
/// Throws NoConvergence unless the residual reaches the tolerance.
[[nodiscard]] Equilibrium refine(const System& s, const Eigen::VectorXd& x_guess, const RefineOptions& options = {});

[[nodiscard]] bool is_equilibrium(const System& s, const Eigen::VectorXd& x, double tol = 1e-8);

/// Every edge coupling has 0 as its only root within the bound and f'(0) < 0.
[[nodiscard]] bool consensus_only_check(const System& s, double bound = 10.0);

/// Removes repeats in edge coordinates (max-norm tolerance), keeping first occurrences.
[[nodiscard]] std::vector<Equilibrium> deduplicate(std::vector<Equilibrium> list, double tol = 1e-8);

}  // namespace conlab
