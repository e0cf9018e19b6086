#include "wcs/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wcs {

using nlohmann::json;

namespace {

const json& member(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing \"" + key + "\"");
    return *it;
}

std::string str_at(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": expected a string");
    return j.get<std::string>();
}

}  // namespace

Network parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ParseError(std::string("malformed network file: ") + ex.what());
    }
    if (!doc.is_object()) throw ParseError("network file: top level must be an object");
    const auto& vars = member(doc, "variables", "network file");
    const auto& cpts = member(doc, "cpts", "network file");
    if (!vars.is_array() || !cpts.is_array()) throw ParseError("network file: variables and cpts must be arrays");

    std::vector<Variable> variables;
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        std::string where = "variables[" + std::to_string(i) + "]";
        const auto& v = vars[i];
        if (!v.is_object()) throw ParseError(where + ": expected an object");
        Variable var;
        var.index = static_cast<int>(i);
        var.name = str_at(member(v, "name", where), where + ".name");
        const auto& st = member(v, "states", where);
        if (!st.is_array()) throw ParseError(where + ".states: expected an array");
        for (std::size_t k = 0; k < st.size(); ++k)
            var.states.push_back(str_at(st[k], where + ".states[" + std::to_string(k) + "]"));
        if (!index.emplace(var.name, var.index).second) throw ValidationError(where + ": duplicate variable name '" + var.name + "'");
        variables.push_back(std::move(var));
    }

    auto lookup = [&](const std::string& name, const std::string& where) {
        auto it = index.find(name);
        if (it == index.end()) throw ValidationError(where + ": unknown variable '" + name + "'");
        return it->second;
    };

    std::vector<Cpt> tables;
    for (std::size_t i = 0; i < cpts.size(); ++i) {
        std::string where = "cpts[" + std::to_string(i) + "]";
        const auto& c = cpts[i];
        if (!c.is_object()) throw ParseError(where + ": expected an object");
        Cpt cpt;
        cpt.child = lookup(str_at(member(c, "child", where), where + ".child"), where + ".child");
        const auto& pa = member(c, "parents", where);
        if (!pa.is_array()) throw ParseError(where + ".parents: expected an array");
        for (std::size_t k = 0; k < pa.size(); ++k)
            cpt.parents.push_back(lookup(str_at(pa[k], where + ".parents"), where + ".parents[" + std::to_string(k) + "]"));
        const auto& rows = member(c, "table", where);
        if (!rows.is_array()) throw ParseError(where + ".table: expected an array of rows");
        int d = variables[static_cast<std::size_t>(cpt.child)].domain_size();
        cpt.child_domain = d;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            std::string rw = where + ".table[" + std::to_string(r) + "]";
            if (!row.is_array()) throw ParseError(rw + ": expected an array");
            if (row.size() != static_cast<std::size_t>(d))
                throw ValidationError(rw + ": shape mismatch, expected " + std::to_string(d) + " entries");
            for (const auto& p : row) {
                if (!p.is_number()) throw ParseError(rw + ": expected numbers");
                cpt.table.push_back(p.get<double>());
            }
        }
        tables.push_back(std::move(cpt));
    }
    // Duplicate cpt detection needs names, so do it before the Network
    // constructor reports a less specific error.
    std::vector<int> seen(variables.size(), 0);
    for (const auto& c : tables)
        if (++seen[static_cast<std::size_t>(c.child)] > 1)
            throw ValidationError("duplicate cpt for '" + variables[static_cast<std::size_t>(c.child)].name + "'");
    return Network(std::move(variables), std::move(tables));
}

std::string serialize_network(const Network& net) {
    json doc;
    doc["variables"] = json::array();
    for (const auto& v : net.variables()) doc["variables"].push_back({{"name", v.name}, {"states", v.states}});
    doc["cpts"] = json::array();
    for (const auto& c : net.cpts()) {
        json parents = json::array();
        for (int p : c.parents) parents.push_back(net.variable(p).name);
        json rows = json::array();
        for (std::size_t r = 0; r < c.row_count(); ++r) {
            auto row = c.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        doc["cpts"].push_back({{"child", net.variable(c.child).name}, {"parents", parents}, {"table", rows}});
    }
    return doc.dump(1) + "\n";
}

Evidence parse_evidence(std::string_view text, const Network& net) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ParseError(std::string("malformed evidence file: ") + ex.what());
    }
    if (!doc.is_object()) throw ParseError("evidence file: top level must be an object");
    const auto& ev = member(doc, "evidence", "evidence file");
    if (!ev.is_object()) throw ParseError("evidence file: \"evidence\" must be an object");
    Evidence e;
    for (auto it = ev.begin(); it != ev.end(); ++it) {
        int var = net.find(it.key());
        if (var < 0) throw ValidationError("evidence: unknown variable '" + it.key() + "'");
        std::string label = str_at(it.value(), "evidence." + it.key());
        int state = net.find_state(var, label);
        if (state < 0) throw ValidationError("evidence: variable '" + it.key() + "' has no state '" + label + "'");
        e.bindings[var] = state;
    }
    return e;
}

std::string serialize_evidence(const Evidence& e, const Network& net) {
    json obj = json::object();
    for (auto [var, state] : e.bindings)
        obj[net.variable(var).name] = net.variable(var).states[static_cast<std::size_t>(state)];
    json doc;
    doc["evidence"] = obj;
    return doc.dump(1) + "\n";
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string marginals_csv(const Marginals& m, const Network& net) {
    std::string out = "variable,state,probability\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& var = net.variable(static_cast<int>(i));
        for (std::size_t s = 0; s < m[i].size(); ++s) {
            out += var.name;
            out += ',';
            out += var.states[s];
            out += ',';
            out += format_double(m[i][s]);
            out += '\n';
        }
    }
    return out;
}

Marginals parse_marginals_csv(std::string_view text, const Network& net) {
    Marginals m;
    m.probs.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i)
        m.probs[i].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(i))), -1.0);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line.rfind("variable,", 0) == 0)) continue;
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError("marginals csv line " + std::to_string(lineno) + ": expected 3 columns");
        std::string name = line.substr(0, c1), state = line.substr(c1 + 1, c2 - c1 - 1), prob = line.substr(c2 + 1);
        int var = net.find(name);
        if (var < 0) throw ValidationError("marginals csv: unknown variable '" + name + "'");
        int s = net.find_state(var, state);
        if (s < 0) throw ValidationError("marginals csv: unknown state '" + state + "' of '" + name + "'");
        double p = 0.0;
        auto res = std::from_chars(prob.data(), prob.data() + prob.size(), p);
        if (res.ec != std::errc{}) throw ParseError("marginals csv line " + std::to_string(lineno) + ": bad probability");
        m.probs[static_cast<std::size_t>(var)][static_cast<std::size_t>(s)] = p;
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        for (double p : m.probs[i])
            if (p < 0.0) throw ValidationError("marginals csv: missing entries for '" + net.variable(static_cast<int>(i)).name + "'");
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace wcs
