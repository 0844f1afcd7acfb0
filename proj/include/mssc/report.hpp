#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "mssc/branch_bound.hpp"
#include "mssc/common.hpp"

namespace mssc {

/// JSON view of a solve outcome. The schema is exactly the report contract:
/// f_opt, labels, lb, gap, nodes, cp_root, cuts_cp_root, gap0, gap_cp,
/// wall_time.
inline nlohmann::json report_to_json(const SolveReport& rep) {
    // Non-finite doubles have no JSON representation; store them as explicit
    // nulls so the in-memory object round-trips identically to its text form.
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["f_opt"] = num(rep.f_opt);
    j["labels"] = rep.labels;
    j["lb"] = num(rep.lb);
    j["gap"] = num(rep.gap);
    j["nodes"] = rep.nodes;
    j["cp_root"] = rep.cp_root;
    j["cuts_cp_root"] = rep.cuts_cp_root;
    j["gap0"] = num(rep.gap0);
    j["gap_cp"] = num(rep.gap_cp);
    j["wall_time"] = num(rep.wall_time);
    return j;
}

inline SolveReport report_from_json(const nlohmann::json& j) {
    // Non-finite doubles serialize as null; map them back to NaN.
    auto num = [&](const char* key) {
        const nlohmann::json& v = j.at(key);
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    SolveReport rep;
    rep.f_opt = num("f_opt");
    rep.labels = j.at("labels").get<std::vector<int>>();
    rep.lb = num("lb");
    rep.gap = num("gap");
    rep.nodes = j.at("nodes").get<long>();
    rep.cp_root = j.at("cp_root").get<int>();
    rep.cuts_cp_root = j.at("cuts_cp_root").get<long>();
    rep.gap0 = num("gap0");
    rep.gap_cp = num("gap_cp");
    rep.wall_time = num("wall_time");
    return rep;
}

inline void write_report(const std::string& path, const SolveReport& rep) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << report_to_json(rep).dump(2) << "\n";
    if (!out) throw IoError("failed while writing report file: " + path);
}

inline SolveReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report is not valid JSON: ") + e.what(), 0, 0);
    }
    return report_from_json(j);
}

}  // namespace mssc
