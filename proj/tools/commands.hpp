#pragma once

#include "conlab/equilibria.hpp"
#include "conlab/error.hpp"
#include "conlab/graph.hpp"
#include "conlab/io.hpp"
#include "conlab/stability.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace conlab::cli {

enum ExitCode : int {
    ExitOk = 0,
    ExitFailure = 1,
    ExitSchema = 2,
    ExitDisconnected = 3,
    ExitBlowup = 4,
    ExitResidual = 5,
    ExitSimulationBlowup = 6,
    ExitDemoFailed = 7,
};

struct GlobalOptions {
    double tol_zero = default_tol_zero;
    double root_bound = 10.0;
    double max_states = 1e6;
    int jobs = 1;
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

/// Bridges grouped into tree motifs, e.g.
/// "3 blocks: Cycle(3), 3×TreeEdge, Complete(4); cut-nodes 3,4,6".
[[nodiscard]] std::string block_summary(const BlockDecomposition& dec);

/// Equilibria of one block (or a graph with a single block): cycle family
/// samples, clique forms, then detailed balance.
[[nodiscard]] std::vector<Equilibrium> block_equilibria(const System& s, const GlobalOptions& options,
                                                        int lambda_samples);

/// Whole-graph enumeration through the block product. Throws Disconnected
/// and CombinatorialBlowup.
[[nodiscard]] std::vector<Equilibrium> enumerate_equilibria(const System& s, const GlobalOptions& options,
                                                            int lambda_samples);

/// classify() over a worker pool; results keep the input order.
[[nodiscard]] std::vector<StabilityVerdict> classify_all(const System& s, const std::vector<Equilibrium>& list,
                                                         const ClassifyOptions& options, int jobs);

/// Full command line; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace conlab::cli
