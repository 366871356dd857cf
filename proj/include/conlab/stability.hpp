#pragma once

// Stability of equilibria. The spectrum of J on the mean-zero plane is always
// computed; the graph criteria (cut-sets, connectivity of G-, Schur reduction,
// effective resistance tests) and the closed forms for trees, cycles and
// cliques annotate it with an evidence chain.

#include "conlab/dynamics.hpp"
#include "conlab/equilibria.hpp"
#include "conlab/linalg.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conlab {

enum class Verdict { Stable, Unstable, Inconclusive };

/// Raw outcome of one criterion before it is folded into a Verdict.
enum class Outcome { Stable, Unstable, Boundary, NotLinearlyStable, NoConclusion, NotApplicable };

[[nodiscard]] const char* to_string(Verdict v) noexcept;
[[nodiscard]] const char* to_string(Outcome o) noexcept;
/// Boundary, NotLinearlyStable, NoConclusion and NotApplicable all map to Inconclusive.
[[nodiscard]] Verdict to_verdict(Outcome o) noexcept;

struct Evidence {
    std::string criterion;
    std::string detail;
    std::string conclusion;
};

struct StabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Evidence> evidence;
    Eigen::VectorXd spectrum;  // J on the mean-zero plane, ascending
    Inertia inertia;           // of `spectrum`
};

struct SpectralOptions {
    double tol_zero = default_tol_zero;
};

/// Drops the eigenvalue closest to 0 (the 1 direction) and classifies the
/// rest. Throws MissingTrivialKernel when none is within tolerance.
[[nodiscard]] StabilityVerdict spectral_verdict(const Eigen::MatrixXd& j, double tol_zero = default_tol_zero);

struct CutSetResult {
    Outcome outcome = Outcome::NoConclusion;
    double sum = 0.0;        // sum of f' over the cut edges
    std::vector<int> side;   // one side of the cut
    std::string description; // which cut fired, for the scan
};

/// Unstable when the derivatives across the cut sum to a positive value.
[[nodiscard]] CutSetResult cut_set_test(const SignedSplit& split, const std::vector<int>& side);
/// Every single-node cut, then every G- component; returns the first that fires.
[[nodiscard]] CutSetResult cut_set_scan(const SignedSplit& split);

struct ConnectivityResult {
    Outcome outcome = Outcome::NoConclusion;
    int minus_components = 0;
    std::optional<int> bridging_plus_edge;
};

/// L+ = 0 with G- connected: Stable. G- disconnected: Unstable if a G+ edge
/// joins two of its components, NotLinearlyStable otherwise.
[[nodiscard]] ConnectivityResult connectivity_test(const SignedSplit& split);

/// Reads a zero-row-sum symmetric matrix as J = L+ - L-: an off-diagonal
/// J_ij < 0 is a G+ edge of weight -J_ij, J_ij > 0 a G- edge of weight J_ij.
/// Entries within tol_rel of max(max |J|, scale_hint) are dropped.
[[nodiscard]] SignedSplit split_from_matrix(const Eigen::MatrixXd& j, double tol_rel = 1e-12, double scale_hint = 0.0);

struct SchurStep {
    int removed = -1;             // original node label
    Eigen::MatrixXd before;
    Eigen::MatrixXd after;
    std::vector<int> labels_after;
    Inertia inertia_before;
    Inertia inertia_after;
    Inertia inertia_block;        // of the 1x1 block that was eliminated
};

struct SchurReduction {
    Eigen::MatrixXd reduced;
    std::vector<int> labels;      // original node of each reduced row
    std::vector<SchurStep> steps;
    SignedSplit reduced_split;
    Inertia discarded;            // summed inertia of the eliminated blocks
};

/// Eliminates, one at a time and lowest label first, nodes with no G+ edge
/// in the current matrix, re-splitting after each step. Throws GMinusDisconnected.
[[nodiscard]] SchurReduction schur_reduce(const SignedSplit& split, double tol_zero = default_tol_zero);

struct OneEdgeResult {
    Outcome outcome = Outcome::NotApplicable;
    int edge = -1;
    double derivative = 0.0;
    double r_minus = 0.0;
    double rho = 0.0;
};

/// Applies when exactly one edge has f' >= 0 and G- plus that edge is
/// connected; rho = f' r-_ij against 1 with a 1e-9 margin.
[[nodiscard]] OneEdgeResult one_edge_resistance_test(const SignedSplit& split);

struct MultiEdgeResult {
    Outcome outcome = Outcome::NoConclusion;
    double sum = 0.0;
    double max_term = 0.0;
    std::vector<std::pair<int, double>> terms;  // (edge, f' r-)
};

/// Sum over G+ of f' r- < 1: Stable; a single term > 1: Unstable.
/// Throws DisconnectedUnion when G+ and G- together do not connect the graph.
[[nodiscard]] MultiEdgeResult multi_edge_resistance_test(const SignedSplit& split);

struct ResistancePairResult {
    Outcome outcome = Outcome::NoConclusion;
    int i = -1;
    int j = -1;
    double r_plus = 0.0;
    double r_minus = 0.0;
    int pairs_checked = 0;
};

inline constexpr double resistance_pair_margin = 1e-6;

/// Unstable when r-_ij > r+_ij (1 + 1e-6) for some pair with finite r+.
/// An empty pair list means every pair.
[[nodiscard]] ResistancePairResult resistance_pair_test(const SignedSplit& split,
                                                        const std::vector<std::pair<int, int>>& pairs = {});

/// Plain resistances r+_ij, r-_ij (possibly infinite).
[[nodiscard]] std::pair<double, double> pair_resistances(const SignedSplit& split, int i, int j);

/// Stable iff every f' < 0, Unstable iff some f' > 0. Throws NotATree.
[[nodiscard]] StabilityVerdict tree_verdict(const System& s, const Equilibrium& eq,
                                            double tol_zero = default_tol_zero);

/// With exactly one edge f' >= 0 on a cycle, rho = f' * sum over the other
/// edges of 1/|f'|. Throws NotACycle.
[[nodiscard]] StabilityVerdict cycle_verdict(const System& s, const Equilibrium& eq,
                                             double tol_zero = default_tol_zero);

struct CliqueThresholds {
    double a = 0.0;
    double b = 0.0;
};

/// a = d0 / (d0 + |da|), b = |da| / (d0 + |da|).
[[nodiscard]] CliqueThresholds clique_thresholds(double d0, double da);

/// Closed form for the K_n state with n0 nodes at 0 and n - n0 at alpha;
/// d0 = f'(0), da = f'(alpha). Throws BadDerivativeSigns on zero derivatives.
[[nodiscard]] StabilityVerdict clique_verdict(double d0, double da, int n, int n0);
[[nodiscard]] StabilityVerdict clique_verdict(const CouplingFunction& f, double alpha, int n, int n0);

/// Closed-form spectrum of J on K_n at (0,...,0,alpha,...,alpha), ascending.
[[nodiscard]] std::vector<double> kn_eigenvalues(int n, int n0, double d0, double da);

struct ClassifyOptions {
    double tol_zero = default_tol_zero;
    double zero_derivative = default_zero_derivative;
    double root_bound = 10.0;
    bool use_blocks = true;
};

/// Closed forms, then the criteria ladder, with the spectrum as the final
/// authority. Graphs with cut-nodes are also classified block by block.
[[nodiscard]] StabilityVerdict classify(const System& s, const Equilibrium& eq, const ClassifyOptions& options = {});

/// True when eq sits on a cycle family: every z multiset equals n/k copies of
/// the roots of f - f(z_0) with |f(z_0)| inside the family interval.
[[nodiscard]] bool on_cycle_family(const System& s, const Equilibrium& eq, double bound = 10.0);

}  // namespace conlab
