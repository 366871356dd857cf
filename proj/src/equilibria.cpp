#include "conlab/equilibria.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace conlab {

const char* to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::DetailedBalance: return "DetailedBalance";
        case Provenance::CycleFamily: return "CycleFamily";
        case Provenance::CliqueForm: return "CliqueForm";
        case Provenance::Composed: return "Composed";
        case Provenance::Refined: return "Refined";
    }
    return "DetailedBalance";
}

std::string Equilibrium::label() const {
    std::ostringstream out;
    out.precision(12);
    out << to_string(provenance);
    if (provenance == Provenance::CycleFamily) out << "(lambda=" << lambda << ")";
    if (provenance == Provenance::CliqueForm) {
        out << "(n0=" << n0 << ",alpha=" << alpha << (incomplete ? ",incomplete" : "") << ")";
    }
    return out.str();
}

Equilibrium make_equilibrium(const System& s, const Eigen::VectorXd& x, Provenance provenance) {
    Equilibrium eq;
    eq.x = mean_zero(x);
    eq.y = edge_coordinates(s.graph(), eq.x);
    eq.provenance = provenance;
    eq.residual = vector_field(s, eq.x).norm();
    return eq;
}

namespace {

// Tree edges in BFS order as (child, parent, edge).
struct TreeStep {
    int child;
    int parent;
    int edge;
};

std::vector<TreeStep> bfs_steps(const Graph& g, const std::vector<int>& tree_edges) {
    std::vector<char> in_tree(static_cast<std::size_t>(g.edge_count()), 0);
    for (int e : tree_edges) in_tree[static_cast<std::size_t>(e)] = 1;
    std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
    std::vector<TreeStep> steps;
    if (g.node_count() == 0) return steps;
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    while (!queue.empty()) {
        const int node = queue.front();
        queue.pop();
        for (const auto& [next, e] : g.neighbors(node)) {
            if (!in_tree[static_cast<std::size_t>(e)] || seen[static_cast<std::size_t>(next)]) continue;
            seen[static_cast<std::size_t>(next)] = 1;
            steps.push_back({next, node, e});
            queue.push(next);
        }
    }
    return steps;
}

std::vector<std::vector<double>> edge_root_sets(const System& s, const EnumerationOptions& options) {
    std::vector<std::vector<double>> sets(static_cast<std::size_t>(s.edge_count()));
    if (s.assignment().is_uniform() && s.edge_count() > 0) {
        const auto shared = roots(s.coupling(0), options.bound, options.roots);
        std::fill(sets.begin(), sets.end(), shared);
    } else {
        for (int e = 0; e < s.edge_count(); ++e) sets[static_cast<std::size_t>(e)] = roots(s.coupling(e), options.bound, options.roots);
    }
    return sets;
}

bool matches_root(const std::vector<double>& root_set, double y) {
    return std::any_of(root_set.begin(), root_set.end(),
                       [&](double r) { return std::abs(r - y) <= 1e-8 * (1.0 + std::abs(r)); });
}

}  // namespace

std::vector<Equilibrium> detailed_balance(const System& s, const EnumerationOptions& options) {
    const Graph& g = s.graph();
    g.require_connected("detailed_balance");
    const std::vector<int> tree = spanning_tree(g);
    const std::vector<TreeStep> steps = bfs_steps(g, tree);
    const auto sets = edge_root_sets(s, options);

    double combos = 1.0;
    for (const auto& step : steps) combos *= static_cast<double>(sets[static_cast<std::size_t>(step.edge)].size());
    if (combos > options.max_states) {
        std::ostringstream msg;
        msg << combos << " root assignments exceed the cap " << options.max_states;
        throw Error(ErrorCode::CombinatorialBlowup, msg.str());
    }

    std::vector<char> in_tree(static_cast<std::size_t>(g.edge_count()), 0);
    for (int e : tree) in_tree[static_cast<std::size_t>(e)] = 1;
    std::vector<int> chords;
    for (int e = 0; e < g.edge_count(); ++e)
        if (!in_tree[static_cast<std::size_t>(e)]) chords.push_back(e);

    // Odometer over tree edges in ascending edge order, first edge slowest.
    std::vector<int> odometer_edges = tree;
    std::vector<std::size_t> digit(odometer_edges.size(), 0);
    std::vector<double> value(static_cast<std::size_t>(g.edge_count()), 0.0);
    std::vector<Equilibrium> out;
    Eigen::VectorXd x(g.node_count());
    while (true) {
        for (std::size_t i = 0; i < odometer_edges.size(); ++i) {
            value[static_cast<std::size_t>(odometer_edges[i])] = sets[static_cast<std::size_t>(odometer_edges[i])][digit[i]];
        }
        if (g.node_count() > 0) x(0) = 0.0;
        for (const auto& step : steps) {
            const double y = value[static_cast<std::size_t>(step.edge)];
            x(step.child) = g.edge(step.edge).v == step.child ? x(step.parent) + y : x(step.parent) - y;
        }
        const bool ok = std::all_of(chords.begin(), chords.end(), [&](int c) {
            return matches_root(sets[static_cast<std::size_t>(c)], x(g.edge(c).v) - x(g.edge(c).u));
        });
        if (ok) out.push_back(make_equilibrium(s, x, Provenance::DetailedBalance));

        std::size_t pos = odometer_edges.size();
        while (pos > 0) {
            --pos;
            if (++digit[pos] < sets[static_cast<std::size_t>(odometer_edges[pos])].size()) break;
            digit[pos] = 0;
            if (pos == 0) return out;
        }
        if (odometer_edges.empty()) return out;
    }
}

std::vector<Equilibrium> tree_equilibria(const System& s, const EnumerationOptions& options) {
    if (!s.graph().is_tree()) throw Error(ErrorCode::NotATree, "graph has a cycle or is disconnected");
    auto list = detailed_balance(s, options);
    for (auto& eq : list) {
        eq.edge_signs.resize(static_cast<std::size_t>(s.edge_count()));
        for (int e = 0; e < s.edge_count(); ++e) {
            const double df = s.coupling(e).derivative(eq.y(e));
            eq.edge_signs[static_cast<std::size_t>(e)] = df > 0.0 ? 1 : (df < 0.0 ? -1 : 0);
        }
    }
    return list;
}

EquilibriumFamily::EquilibriumFamily(System system, std::vector<int> order, int k, double epsilon, double bound)
    : system_(std::move(system)), order_(std::move(order)), k_(k), epsilon_(epsilon), bound_(bound) {}

Eigen::VectorXd EquilibriumFamily::z(double lambda) const {
    if (!(lambda > lambda_min() - 1e-15 && lambda < lambda_max() + 1e-15)) {
        throw Error(ErrorCode::InvalidArgument, "lambda outside the family interval");
    }
    const auto beta = roots_shifted(system_.coupling(0), lambda, bound_);
    if (static_cast<int>(beta.size()) != k_) {
        throw Error(ErrorCode::RootFindingFailed, "expected " + std::to_string(k_) + " roots of f - lambda");
    }
    const auto n = static_cast<int>(order_.size());
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = beta[static_cast<std::size_t>(i % k_)];
    return out;
}

Equilibrium EquilibriumFamily::at(double lambda) const {
    const Eigen::VectorXd zs = z(lambda);
    const auto n = static_cast<int>(order_.size());
    Eigen::VectorXd x(n);
    double running = 0.0;
    for (int i = 0; i < n; ++i) {
        x(order_[static_cast<std::size_t>(i)]) = running;
        running += zs(i);
    }
    Equilibrium eq = make_equilibrium(system_, x, Provenance::CycleFamily);
    eq.lambda = lambda;
    return eq;
}

std::vector<Equilibrium> EquilibriumFamily::sample(int count) const {
    std::vector<Equilibrium> out;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
        out.push_back(at(lambda_min() + t * (lambda_max() - lambda_min())));
    }
    return out;
}

CycleFamilyResult cycle_family(const System& s, double bound) {
    const Graph& g = s.graph();
    if (!g.is_cycle()) throw Error(ErrorCode::NotACycle, "graph is not a cycle");
    if (!s.assignment().is_uniform() || !s.coupling(0).is_polynomial()) {
        throw Error(ErrorCode::NotPolynomial, "cycle family needs one odd polynomial on every edge");
    }
    const CouplingFunction& f = s.coupling(0);
    const int k = f.degree();
    const int n = g.node_count();
    CycleFamilyResult result;
    if (k <= 1) {
        result.explanation = "degree " + std::to_string(k) + ": a linear coupling has no continuum";
        return result;
    }
    const auto base = roots(f, bound);
    if (static_cast<int>(base.size()) != k) {
        result.explanation = "f has " + std::to_string(base.size()) + " real roots in [-bound, bound], degree is " +
                             std::to_string(k);
        return result;
    }
    for (double r : base) {
        if (is_degenerate_root(f, r)) {
            result.explanation = "root " + std::to_string(r) + " is not simple";
            return result;
        }
    }
    if (n % k != 0) {
        result.explanation = std::to_string(k) + " does not divide " + std::to_string(n);
        return result;
    }

    auto keeps_k = [&](double lambda) { return static_cast<int>(roots_shifted(f, lambda, bound).size()) == k; };
    double lo = 0.0;
    double hi = 1.0;
    while (keeps_k(hi) && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (keeps_k(mid)) lo = mid;
        else hi = mid;
    }
    if (!(lo > 0.0)) {
        result.explanation = "no lambda > 0 keeps " + std::to_string(k) + " roots";
        return result;
    }
    result.family.emplace(s, cycle_order(g), k, lo, bound);
    std::ostringstream msg;
    msg.precision(12);
    msg << "continuum for lambda in (" << result.family->lambda_min() << ", " << result.family->lambda_max() << ")";
    result.explanation = msg.str();
    return result;
}

std::vector<Equilibrium> clique_equilibria(const CouplingFunction& f, int n, double bound) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "clique closed form needs n >= 3");
    const System s(complete_graph(n), CouplingAssignment::uniform(f));
    const auto all = roots(f, bound);
    const auto positive = positive_roots(all);
    const bool open = is_additive_open(positive);

    std::vector<Equilibrium> out;
    Equilibrium origin = make_equilibrium(s, Eigen::VectorXd::Zero(n), Provenance::CliqueForm);
    origin.n0 = n;
    origin.incomplete = !open;
    out.push_back(origin);
    for (double alpha : positive) {
        for (int n0 = 1; n0 < n; ++n0) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            x.tail(n - n0).setConstant(alpha);
            Equilibrium eq = make_equilibrium(s, x, Provenance::CliqueForm);
            eq.n0 = n0;
            eq.alpha = alpha;
            eq.incomplete = !open;
            out.push_back(eq);
        }
    }
    return out;
}

CoalescenceProduct::CoalescenceProduct(const Graph& g, const BlockDecomposition& decomposition,
                                       std::vector<std::vector<Eigen::VectorXd>> block_edge_values)
    : graph_(g), decomposition_(decomposition), values_(std::move(block_edge_values)) {
    if (values_.size() != decomposition_.blocks.size()) {
        throw Error(ErrorCode::InvalidArgument, "one equilibrium list per block expected");
    }
    count_ = values_.empty() ? 0 : 1;
    for (std::size_t b = 0; b < values_.size(); ++b) {
        for (const auto& y : values_[b]) {
            if (y.size() != static_cast<Eigen::Index>(decomposition_.blocks[b].edges.size())) {
                throw Error(ErrorCode::InvalidArgument, "block " + std::to_string(b) + " edge vector length");
            }
        }
        const auto size = static_cast<std::uint64_t>(values_[b].size());
        if (size == 0) {
            count_ = 0;
        } else if (count_ > std::numeric_limits<std::uint64_t>::max() / size) {
            count_ = std::numeric_limits<std::uint64_t>::max();
        } else {
            count_ *= size;
        }
    }
}

std::vector<int> CoalescenceProduct::choice(std::uint64_t index) const {
    if (index >= count_) throw Error(ErrorCode::IndexOutOfRange, "product index");
    std::vector<int> pick(values_.size(), 0);
    for (std::size_t b = values_.size(); b-- > 0;) {
        const auto size = static_cast<std::uint64_t>(values_[b].size());
        pick[b] = static_cast<int>(index % size);
        index /= size;
    }
    return pick;
}

Eigen::VectorXd CoalescenceProduct::edge_values(std::uint64_t index) const {
    const auto pick = choice(index);
    Eigen::VectorXd y(graph_.edge_count());
    for (std::size_t b = 0; b < values_.size(); ++b) {
        const auto& edges = decomposition_.blocks[b].edges;
        const Eigen::VectorXd& local = values_[b][static_cast<std::size_t>(pick[b])];
        for (std::size_t i = 0; i < edges.size(); ++i) y(edges[i]) = local(static_cast<Eigen::Index>(i));
    }
    return y;
}

Equilibrium CoalescenceProduct::equilibrium(const System& s, std::uint64_t index) const {
    return make_equilibrium(s, node_from_edges(graph_, edge_values(index)), Provenance::Composed);
}

CoalescenceProduct compose_coalescence(const Graph& g, const BlockDecomposition& decomposition,
                                       std::vector<std::vector<Eigen::VectorXd>> block_edge_values) {
    return CoalescenceProduct(g, decomposition, std::move(block_edge_values));
}

System block_system(const System& s, const Subgraph& block) {
    if (s.assignment().is_uniform()) return System(block.graph, s.assignment());
    std::vector<CouplingFunction> fs;
    for (int e : block.edges) fs.push_back(s.coupling(e));
    return System(block.graph, CouplingAssignment::per_edge(std::move(fs)));
}

Equilibrium refine(const System& s, const Eigen::VectorXd& x_guess, const RefineOptions& options) {
    if (x_guess.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "guess length != node count");
    if (!x_guess.allFinite()) throw Error(ErrorCode::NonFinite, "guess");
    Eigen::VectorXd x = mean_zero(x_guess);
    Eigen::VectorXd field = vector_field(s, x);
    double residual = field.norm();
    for (int it = 0; it < options.max_iter && residual > options.tolerance; ++it) {
        const Eigen::VectorXd step = -(pseudoinverse(jacobian(s, x)) * field);
        double scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
            const Eigen::VectorXd trial = mean_zero(x + scale * step);
            const Eigen::VectorXd trial_field = vector_field(s, trial);
            if (trial_field.norm() < residual) {
                x = trial;
                field = trial_field;
                residual = trial_field.norm();
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(residual <= options.tolerance)) {
        throw Error(ErrorCode::NoConvergence, "residual " + std::to_string(residual));
    }
    Equilibrium eq = make_equilibrium(s, x, Provenance::Refined);
    return eq;
}

bool is_equilibrium(const System& s, const Eigen::VectorXd& x, double tol) { return vector_field(s, x).norm() <= tol; }

bool consensus_only_check(const System& s, double bound) {
    const int checks = s.assignment().is_uniform() ? std::min(1, s.edge_count()) : s.edge_count();
    for (int e = 0; e < checks; ++e) {
        const CouplingFunction& f = s.coupling(e);
        if (!(f.derivative(0.0) < 0.0)) return false;
        if (roots(f, bound).size() != 1) return false;
    }
    return true;
}

std::vector<Equilibrium> deduplicate(std::vector<Equilibrium> list, double tol) {
    std::vector<Equilibrium> out;
    for (auto& eq : list) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Equilibrium& other) {
            return other.y.size() == eq.y.size() && (eq.y.size() == 0 || (other.y - eq.y).cwiseAbs().maxCoeff() <= tol);
        });
        if (!seen) out.push_back(std::move(eq));
    }
    return out;
}

}  // namespace conlab
