#pragma once

#include "conlab/dynamics.hpp"
#include "conlab/graph.hpp"

#include <map>
#include <string>
#include <vector>

namespace conlab::cli {

struct Check {
    std::string name;
    bool ok = false;
    std::string expected;
    std::string got;
};

struct DemoReport {
    std::string name;
    std::vector<Check> checks;
    std::map<std::string, std::string> artifacts;  // file name -> contents

    [[nodiscard]] bool passed() const;
    void check(std::string check_name, bool ok, std::string expected, std::string got);
};

[[nodiscard]] const std::vector<std::string>& demo_names();

/// Nine nodes: a triangle, a three-edge star and a K4 joined at nodes 3, 4, 6 (1-based).
[[nodiscard]] Graph motif_graph();

/// Five-node signed pair L+, L- whose recursive Schur reduction removes node
/// 5 and then node 4 (1-based).
[[nodiscard]] SignedSplit schur_example_split();

DemoReport demo_tree_of_motifs();
DemoReport demo_c3_circle();
DemoReport demo_schur_example();
DemoReport demo_kn_eigen(unsigned long long seed = 7);

/// Throws InvalidArgument on an unknown name.
DemoReport run_demo(const std::string& name);

void write_artifacts(const DemoReport& report, const std::string& dir);

}  // namespace conlab::cli
