#ifndef pesp_io_hpp
#define pesp_io_hpp

#include "pesp/cuts.hpp"
#include "pesp/engine.hpp"
#include "pesp/instance.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pesp {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline int64_t parse_int(const std::string& field, int line, const char* what) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad " + std::string(what) + " '" + field + "' at line " +
                      std::to_string(line));
    }
}

}  // namespace detail

// PESPlib activity format: "id; tail; head; lower; upper; weight" with
// '#'-prefixed comment lines; extra trailing fields are tolerated.
inline PespInstance parse_activities(std::istream& in, int64_t period,
                                     const std::string& name = "<stream>") {
    if (period < 2) throw IoError("period must be at least 2");
    PespInstance inst;
    inst.period = period;
    std::set<int> nodes, ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string field;
        while (std::getline(ss, field, ';')) fields.push_back(detail::trim(field));
        if (fields.size() < 6)
            throw IoError("expected 6 ';'-separated fields at line " + std::to_string(lineno) +
                          " of " + name);
        Arc a;
        a.id = static_cast<int>(detail::parse_int(fields[0], lineno, "arc id"));
        a.tail = static_cast<int>(detail::parse_int(fields[1], lineno, "tail node"));
        a.head = static_cast<int>(detail::parse_int(fields[2], lineno, "head node"));
        a.lower = detail::parse_int(fields[3], lineno, "lower bound");
        a.upper = detail::parse_int(fields[4], lineno, "upper bound");
        try {
            a.weight = rat_from_string(fields[5]);
        } catch (const std::exception&) {
            throw IoError("bad weight '" + fields[5] + "' at line " + std::to_string(lineno));
        }
        if (a.tail <= 0 || a.head <= 0)
            throw IoError("non-positive node id at line " + std::to_string(lineno));
        if (a.upper < a.lower)
            throw IoError("upper < lower at line " + std::to_string(lineno));
        if (!ids.insert(a.id).second)
            throw IoError("duplicate arc id " + std::to_string(a.id) + " at line " +
                          std::to_string(lineno));
        nodes.insert(a.tail);
        nodes.insert(a.head);
        inst.arcs.push_back(a);
    }
    inst.nodes.assign(nodes.begin(), nodes.end());
    return inst;
}

inline PespInstance parse_activities(const std::string& path, int64_t period) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_activities(in, period, path);
}

inline void write_activities(std::ostream& out, const PespInstance& inst) {
    out << "# activities: id; tail; head; lower; upper; weight\n";
    for (const Arc& a : inst.arcs)
        out << a.id << "; " << a.tail << "; " << a.head << "; " << a.lower << "; " << a.upper
            << "; " << rat_to_string(a.weight) << "\n";
}

inline void write_activities(const std::string& path, const PespInstance& inst) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_activities(out, inst);
}

// --- cut / point / report JSON ---------------------------------------------

inline nlohmann::json cut_to_json(const FlipCut& cut) {
    nlohmann::json j;
    j["gamma"] = nlohmann::json::array();
    for (const auto& [id, c] : cut.gamma.entries) j["gamma"].push_back({id, c});
    j["F"] = std::vector<int>(cut.F.begin(), cut.F.end());
    j["alpha"] = cut.alpha_value;
    j["coefficients"] = nlohmann::json::object();
    for (const auto& [id, c] : cut.coefficients)
        j["coefficients"][std::to_string(id)] = rat_to_string(c);
    j["rhs"] = rat_to_string(cut.rhs);
    return j;
}

// Rebuilds the cut from its (gamma, F) provenance and cross-checks the stored
// right-hand side, so replayed cuts cannot drift from their derivation.
inline FlipCut cut_from_json(const PespInstance& inst, const nlohmann::json& j) {
    OrientedCycle g;
    for (const auto& entry : j.at("gamma")) g.entries[entry.at(0).get<int>()] = entry.at(1).get<int>();
    ArcSubset F;
    for (int id : j.at("F")) F.insert(id);
    FlipCut cut = flip_cut(inst, g, F);
    if (j.contains("rhs") && rat_from_string(j.at("rhs").get<std::string>()) != cut.rhs)
        throw IoError("cut JSON rhs does not match its (gamma, F) provenance");
    return cut;
}

inline nlohmann::json point_to_json(const Tension& x) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, v] : x) j[std::to_string(id)] = rat_to_string(v);
    return j;
}

inline Tension point_from_json(const nlohmann::json& j) {
    Tension x;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_string())
            x[std::stoi(it.key())] = rat_from_string(it.value().get<std::string>());
        else
            x[std::stoi(it.key())] = rat_of(it.value().get<double>());
    }
    return x;
}

inline nlohmann::json report_to_json(const PespInstance& inst, const std::string& instance_name,
                                     const Report& report) {
    nlohmann::json j;
    j["instance"] = instance_name;
    j["period"] = inst.period;
    j["mu"] = inst.mu();
    j["status"] = to_string(report.status);
    j["bound_wx"] = report.bound_wx;
    j["bound_slack"] = report.bound_slack;
    j["cuts_total"] = report.cuts_total;
    j["cuts_exact"] = report.cuts_exact;
    j["runtime_s"] = report.runtime_s;
    j["cuts"] = nlohmann::json::array();
    for (const FlipCut& cut : report.pool) j["cuts"].push_back(cut_to_json(cut));
    return j;
}

// Iteration log CSV per the engine schema.
inline void write_csv_log(std::ostream& out, const Report& report) {
    out << "wall_time_s,iteration,phase,alpha,cuts_added,pool_size,lp_bound_wx,lp_bound_slack\n";
    out << std::setprecision(12);
    for (const LogEntry& e : report.log) {
        out << e.wall_time_s << ',' << e.iteration << ',' << e.phase << ',';
        if (e.alpha) out << *e.alpha;
        out << ',' << e.cuts_added << ',' << e.pool_size << ',' << e.lp_bound_wx << ','
            << e.lp_bound_slack << "\n";
    }
}

inline void write_csv_log(const std::string& path, const Report& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_csv_log(out, report);
}

}  // namespace pesp

#endif
