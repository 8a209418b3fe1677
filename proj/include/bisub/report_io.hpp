// SPDX-License-Identifier: MIT
//
// Report rendering in three formats.
//   text: human-readable, 6 significant digits, stable except the wall line
//   json: lossless round-trip numbers; shape given in docs/report.schema.json
//   csv:  17 significant digits, fixed column order (see docs/model-format.md)
//
// The renderers are pure string producers; printing and exit codes belong to
// the caller.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bisub/harness.hpp"

namespace bisub {

enum class ReportFormat { Text, Json, Csv };

[[nodiscard]] inline ReportFormat parse_format(const std::string& s) {
    if (s == "text") return ReportFormat::Text;
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw std::invalid_argument("unknown format '" + s +
                                "'; choose text, json or csv");
}

namespace io_detail {

[[nodiscard]] inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

[[nodiscard]] inline std::string text_point(const Point& p) {
    return "(" + num6(p.x) + ", " + num6(p.y) + ", " + num6(p.z) + ")";
}

[[nodiscard]] inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline std::string csv_point(const Point& p) {
    return num17(p.x) + "," + num17(p.y) + "," + num17(p.z);
}

[[nodiscard]] inline nlohmann::json to_json(const Point& p) {
    return nlohmann::json::array({p.x, p.y, p.z});
}

[[nodiscard]] inline nlohmann::json to_json(const CheckResult& c) {
    return {{"name", c.name},
            {"max", c.max},
            {"witness", to_json(c.witness)},
            {"tol", c.tol},
            {"pass", c.pass()}};
}

[[nodiscard]] inline nlohmann::json to_json(const ToleranceSet& t) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& nf : ToleranceSet::fields()) out[nf.name] = t.*nf.field;
    return out;
}

[[nodiscard]] inline std::string text_check(const CheckResult& c) {
    return "  " + c.name + ": max " + num6(c.max) + " at " +
           text_point(c.witness) + " [tol " + num6(c.tol) + ", " +
           (c.pass() ? "ok" : "FAIL") + "]\n";
}

}  // namespace io_detail

// ===========================================================================
// Classification reports
// ===========================================================================

[[nodiscard]] inline std::string render_report(const VerificationReport& r,
                                               ReportFormat f) {
    using namespace io_detail;
    switch (f) {
        case ReportFormat::Json: {
            nlohmann::json j = {{"model", r.model},
                                {"kind", r.kind},
                                {"verdict", to_string(r.verdict)},
                                {"detail", r.detail},
                                {"checks", nlohmann::json::array()},
                                {"min_tension", r.min_tension},
                                {"min_tension_witness",
                                 to_json(r.min_tension_witness)},
                                {"tolerances", to_json(r.tolerances)},
                                {"points", r.points},
                                {"wall_seconds", r.wall_seconds}};
            for (const CheckResult& c : r.checks) j["checks"].push_back(to_json(c));
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv: {
            std::string out =
                "model,kind,verdict,check,max,witness_x,witness_y,witness_z,"
                "tol,pass\n";
            for (const CheckResult& c : r.checks)
                out += csv_field(r.model) + "," + r.kind + "," +
                       to_string(r.verdict) + "," + csv_field(c.name) + "," +
                       num17(c.max) + "," + csv_point(c.witness) + "," +
                       num17(c.tol) + "," + (c.pass() ? "true" : "false") + "\n";
            return out;
        }
        case ReportFormat::Text: {
            std::string out = "model: " + r.model + " (" + r.kind + ")\n";
            out += "points: " + std::to_string(r.points) + "\n";
            out += "verdict: " + std::string(to_string(r.verdict)) + "\n";
            if (!r.detail.empty()) out += "detail: " + r.detail + "\n";
            for (const CheckResult& c : r.checks) out += text_check(c);
            out += "  min tension: " + num6(r.min_tension) + " at " +
                   text_point(r.min_tension_witness) + "\n";
            out += "wall: " + num6(r.wall_seconds) + " s\n";
            return out;
        }
    }
    return {};
}

// ===========================================================================
// Space-form audit reports
// ===========================================================================

[[nodiscard]] inline std::string render_audit(const AuditReport& a,
                                              ReportFormat f) {
    using namespace io_detail;
    switch (f) {
        case ReportFormat::Json: {
            nlohmann::json j = {{"model", a.model},
                                {"c", a.c},
                                {"pass", a.pass()},
                                {"worst", a.worst()},
                                {"curvature", nlohmann::json::array()},
                                {"vertical", nlohmann::json::array()},
                                {"tolerances", to_json(a.tolerances)},
                                {"points", a.points},
                                {"wall_seconds", a.wall_seconds}};
            for (const CheckResult& c : a.curvature)
                j["curvature"].push_back(to_json(c));
            for (const CheckResult& c : a.vertical)
                j["vertical"].push_back(to_json(c));
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv: {
            std::string out =
                "model,c,section,check,max,witness_x,witness_y,witness_z,tol,"
                "pass\n";
            auto rows = [&](const std::vector<CheckResult>& list,
                            const char* section) {
                for (const CheckResult& c : list)
                    out += csv_field(a.model) + "," + num17(a.c) + "," +
                           section + "," + csv_field(c.name) + "," +
                           num17(c.max) + "," + csv_point(c.witness) + "," +
                           num17(c.tol) + "," + (c.pass() ? "true" : "false") +
                           "\n";
            };
            rows(a.curvature, "curvature");
            rows(a.vertical, "vertical");
            return out;
        }
        case ReportFormat::Text: {
            std::string out = "model: " + a.model + "\n";
            out += "audit against constant curvature c = " + num6(a.c) + "\n";
            out += "points: " + std::to_string(a.points) + "\n";
            out += std::string("result: ") + (a.pass() ? "pass" : "FAIL") +
                   " (worst residual " + num6(a.worst()) + ")\n";
            for (const CheckResult& c : a.curvature) out += text_check(c);
            for (const CheckResult& c : a.vertical) out += text_check(c);
            out += "wall: " + num6(a.wall_seconds) + " s\n";
            return out;
        }
    }
    return {};
}

// ===========================================================================
// Finite-difference cross-check reports
// ===========================================================================

[[nodiscard]] inline std::string render_crosscheck(const std::string& model,
                                                   const FdResult& r, double tol,
                                                   ReportFormat f) {
    using namespace io_detail;
    const bool pass = r.max < tol;
    switch (f) {
        case ReportFormat::Json: {
            const nlohmann::json j = {{"model", model},
                                      {"max", r.max},
                                      {"quantity", r.quantity},
                                      {"witness", to_json(r.witness)},
                                      {"tol", tol},
                                      {"pass", pass}};
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv:
            return "model,max,quantity,witness_x,witness_y,witness_z,tol,pass\n" +
                   csv_field(model) + "," + num17(r.max) + "," +
                   csv_field(r.quantity) + "," + csv_point(r.witness) + "," +
                   num17(tol) + "," + (pass ? "true" : "false") + "\n";
        case ReportFormat::Text: {
            std::string out = "model: " + model + "\n";
            out += "max relative deviation: " + num6(r.max);
            if (!r.quantity.empty())
                out += " (" + r.quantity + " at " + text_point(r.witness) + ")";
            out += "\n";
            out += std::string("result: ") + (pass ? "ok" : "FAIL") + " [tol " +
                   num6(tol) + "]\n";
            return out;
        }
    }
    return {};
}

}  // namespace bisub
