#include "conlab/io.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace conlab {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::Schema, msg); }

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) schema(where + ": expected a number");
    return j.get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Json load_json(const std::string& source) {
    const auto first = source.find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) return Json::parse(source);
        std::ifstream in(source);
        if (!in) schema("cannot open " + source);
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        schema(std::string("invalid JSON: ") + e.what());
    }
}

Graph graph_from_json(const Json& j) {
    const Json& n = field(j, "n", "graph");
    if (!n.is_number_integer() || n.get<long long>() < 0) schema("graph: \"n\" must be a nonnegative integer");
    const Json& edges = field(j, "edges", "graph");
    if (!edges.is_array()) schema("graph: \"edges\" must be an array");
    std::vector<std::pair<int, int>> pairs;
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            schema("graph: each edge must be [i, j] with integer endpoints");
        }
        pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Graph(n.get<int>(), pairs);
}

Json graph_to_json(const Graph& g) {
    Json edges = Json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
    return {{"n", g.node_count()}, {"edges", edges}};
}

CouplingFunction coupling_from_json(const Json& j) {
    const Json& kind = field(j, "kind", "coupling");
    if (!kind.is_string()) schema("coupling: \"kind\" must be a string");
    const auto k = kind.get<std::string>();
    if (k == "odd_polynomial") {
        const Json& c = field(j, "coeffs", "coupling");
        if (!c.is_array() || c.empty()) schema("coupling: \"coeffs\" must be a nonempty array");
        std::vector<double> coeffs;
        for (const auto& a : c) coeffs.push_back(number(a, "coupling coeffs"));
        return CouplingFunction::odd_polynomial(std::move(coeffs));
    }
    if (k == "sine") return CouplingFunction::sine(number(field(j, "amplitude", "coupling"), "coupling amplitude"));
    if (k == "linear") return CouplingFunction::linear(number(field(j, "slope", "coupling"), "coupling slope"));
    schema("coupling: unknown kind \"" + k + "\"");
}

Json coupling_to_json(const CouplingFunction& f) {
    switch (f.kind()) {
        case CouplingKind::Linear: return {{"kind", "linear"}, {"slope", f.odd_coefficients().at(0)}};
        case CouplingKind::OddPolynomial: return {{"kind", "odd_polynomial"}, {"coeffs", f.odd_coefficients()}};
        case CouplingKind::Sine: return {{"kind", "sine"}, {"amplitude", f.amplitude()}};
        case CouplingKind::Custom: return {{"kind", "custom"}, {"name", f.describe()}};
    }
    return {};
}

CouplingAssignment assignment_from_json(const Json& j, int edge_count) {
    if (j.is_object()) return CouplingAssignment::uniform(coupling_from_json(j));
    if (!j.is_array()) schema("coupling: expected an object or an array of objects");
    if (static_cast<int>(j.size()) != edge_count) {
        schema("coupling: " + std::to_string(j.size()) + " entries for " + std::to_string(edge_count) + " edges");
    }
    std::vector<CouplingFunction> fs;
    for (const auto& c : j) fs.push_back(coupling_from_json(c));
    return CouplingAssignment::per_edge(std::move(fs));
}

System system_from_json(const Json& j) {
    Graph g = graph_from_json(field(j, "graph", "spec"));
    CouplingAssignment a = assignment_from_json(field(j, "coupling", "spec"), g.edge_count());
    return System(std::move(g), std::move(a));
}

Json verdict_to_json(const StabilityVerdict& v) {
    Json evidence = Json::array();
    for (const auto& e : v.evidence) evidence.push_back({{"criterion", e.criterion}, {"detail", e.detail}, {"conclusion", e.conclusion}});
    std::vector<double> spectrum(v.spectrum.data(), v.spectrum.data() + v.spectrum.size());
    std::sort(spectrum.begin(), spectrum.end());
    return {{"schema", schema_tag},
            {"verdict", to_string(v.verdict)},
            {"spectrum", spectrum},
            {"inertia", {{"plus", v.inertia.plus}, {"minus", v.inertia.minus}, {"zero", v.inertia.zero}}},
            {"evidence", evidence}};
}

std::string equilibria_csv(const std::vector<Equilibrium>& list, int n, int m) {
    std::ostringstream out;
    out << "provenance,residual";
    for (int i = 0; i < n; ++i) out << ",x" << i;
    for (int e = 0; e < m; ++e) out << ",y" << e;
    out << '\n';
    for (const auto& eq : list) {
        out << '"' << eq.label() << "\"," << format_number(eq.residual);
        for (Eigen::Index i = 0; i < eq.x.size(); ++i) out << ',' << format_number(eq.x(i));
        for (Eigen::Index e = 0; e < eq.y.size(); ++e) out << ',' << format_number(eq.y(e));
        out << '\n';
    }
    return out.str();
}

std::vector<Eigen::VectorXd> states_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) schema("equilibria CSV: empty");
    const auto header = split_csv_line(line);
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c].size() > 1 && header[c][0] == 'x') cols.push_back(c);
    if (cols.empty()) schema("equilibria CSV: no x columns");
    std::vector<Eigen::VectorXd> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        Eigen::VectorXd x(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] >= cells.size()) schema("equilibria CSV: short row");
            try {
                x(static_cast<Eigen::Index>(k)) = std::stod(cells[cols[k]]);
            } catch (const std::exception&) {
                schema("equilibria CSV: bad number \"" + cells[cols[k]] + "\"");
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream out;
    out << 't';
    const Eigen::Index n = tr.x.empty() ? 0 : tr.x.front().size();
    for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
    out << '\n';
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        out << format_number(tr.t[k]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(tr.x[k](i));
        out << '\n';
    }
    return out.str();
}

}  // namespace conlab
