// SPDX-License-Identifier: MIT
//
// Declarative model files: a restricted line-based "key = value" format with
// expression strings, no code execution. The serializer writes a canonical
// form (fixed key order, canonical expression printing, round-trip-exact
// numbers), so parse -> serialize -> parse is the identity and
// serialize -> parse -> serialize is a textual fixed point.
//
// Document syntax, one declaration per line ('#' starts a comment):
//
//   name = warped                        required
//   kind = framed | vertical-field      required
//   note = free text                     optional
//   coordinates = x y z                  optional (fixed chart coordinates)
//   param c1 = 1                         repeatable
//   metric = xx, xy, xz, yy, yz, zz      required; six expressions
//   frame.e1 = ax, ay, az                framed: three rows, e3 vertical
//   frame.e2 / frame.e3                  (expressions, chart components)
//   vertical = ax, ay, az                vertical-field models instead
//   base.metric = hxx, hxy, hyy          optional block, framed only:
//   base.frame.eps1 = ax, ay             all four base.* keys or none
//   base.frame.eps2 = ax, ay
//   base.projection = p1, p2
//   curvature = -1                       optional, framed only
//   domain.x = 0 .. inf                  optional per axis (open interval)
//   grid.lo = -1, -1, -1                 required
//   grid.hi = 1, 1, 1                    required
//   grid.count = 9, 9, 9                 required

#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bisub/models.hpp"

namespace bisub {

/// Diagnostic for an unusable model file; 1-based line and column point at
/// the offending text (0 when no location applies, e.g. a missing key).
class ModelFileError : public std::runtime_error {
public:
    ModelFileError(int line, int column, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) +
                                            ", column " +
                                            std::to_string(column) + ": " + what
                                      : what),
          line_(line),
          column_(column) {}
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_, column_;
};

namespace file_detail {

struct RawEntry {
    int line = 0;
    std::string key;
    std::string value;
    int value_col = 0;  // 1-based column where the value text starts
    bool used = false;
};

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

[[nodiscard]] inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> k = {
        "name",           "kind",           "note",
        "coordinates",    "metric",         "frame.e1",
        "frame.e2",       "frame.e3",       "vertical",
        "base.metric",    "base.frame.eps1", "base.frame.eps2",
        "base.projection", "curvature",     "domain.x",
        "domain.y",       "domain.z",       "grid.lo",
        "grid.hi",        "grid.count"};
    return k;
}

[[nodiscard]] inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

/// One comma-separated piece of a value, with its own column.
struct Piece {
    std::string text;
    int col = 0;
};

[[nodiscard]] inline std::vector<Piece> split_list(const RawEntry& e) {
    std::vector<Piece> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = e.value.find(',', start);
        const std::size_t end = comma == std::string::npos ? e.value.size() : comma;
        std::size_t b = start;
        while (b < end && is_space(e.value[b])) ++b;
        out.push_back({trim(e.value.substr(start, end - start)),
                       e.value_col + static_cast<int>(b)});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[nodiscard]] inline double parse_number(const Piece& p, int line,
                                         bool allow_infinite) {
    if (p.text.empty())
        throw ModelFileError(line, p.col, "expected a number");
    char* end = nullptr;
    const double v = std::strtod(p.text.c_str(), &end);
    if (end != p.text.c_str() + p.text.size())
        throw ModelFileError(
            line, p.col + static_cast<int>(end - p.text.c_str()),
            "trailing characters after number '" + p.text + "'");
    if (std::isnan(v) || (!allow_infinite && std::isinf(v)))
        throw ModelFileError(line, p.col,
                             "expected a finite number, got '" + p.text + "'");
    return v;
}

[[nodiscard]] inline Expr parse_expression(const Piece& p, int line,
                                           const std::set<std::string>& params) {
    if (p.text.empty())
        throw ModelFileError(line, p.col, "expected an expression");
    try {
        return parse_expr(p.text, params);
    } catch (const ParseError& pe) {
        std::string reason = pe.what();
        if (const std::size_t cut = reason.find(": "); cut != std::string::npos)
            reason = reason.substr(cut + 2);
        throw ModelFileError(line, p.col + static_cast<int>(pe.offset()),
                             "syntax error: " + reason);
    }
}

[[nodiscard]] inline std::string fmt_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Document {
public:
    explicit Document(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            if (const std::size_t hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            if (trim(raw).empty()) continue;

            const std::size_t eq = raw.find('=');
            if (eq == std::string::npos)
                throw ModelFileError(line_no, first_col(raw),
                                     "expected 'key = value'");
            RawEntry e;
            e.line = line_no;
            e.key = trim(raw.substr(0, eq));
            std::size_t vb = eq + 1;
            while (vb < raw.size() && is_space(raw[vb])) ++vb;
            e.value = trim(raw.substr(eq + 1));
            e.value_col = static_cast<int>(vb) + 1;
            if (e.key.empty())
                throw ModelFileError(line_no, 1, "missing key before '='");
            if (e.value.empty())
                throw ModelFileError(line_no, e.value_col,
                                     "missing value for key '" + e.key + "'");
            normalize_key(e);
            if (const auto [it, fresh] = index_.emplace(e.key, entries_.size());
                !fresh)
                throw ModelFileError(line_no, 1,
                                     "duplicate key '" + e.key +
                                         "' (first given on line " +
                                         std::to_string(entries_[it->second].line) +
                                         ")");
            entries_.push_back(std::move(e));
        }
    }

    [[nodiscard]] const RawEntry* find(const std::string& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) return nullptr;
        entries_[it->second].used = true;
        return &entries_[it->second];
    }

    [[nodiscard]] const RawEntry& require(const std::string& key) const {
        if (const RawEntry* e = find(key)) return *e;
        throw ModelFileError(0, 0, "missing required key '" + key + "'");
    }

    [[nodiscard]] std::set<std::string> param_names() const {
        std::set<std::string> names;
        for (const RawEntry& e : entries_)
            if (e.key.rfind("param ", 0) == 0) names.insert(e.key.substr(6));
        return names;
    }

    [[nodiscard]] Params params() const {
        Params out;
        for (RawEntry& e : entries_)
            if (e.key.rfind("param ", 0) == 0) {
                out[e.key.substr(6)] =
                    parse_number({e.value, e.value_col}, e.line, false);
                e.used = true;
            }
        return out;
    }

    /// Every key must have been consumed by the typed reader; anything left
    /// is invalid for the declared kind.
    void forbid_leftovers(const std::string& kind) const {
        for (const RawEntry& e : entries_)
            if (!e.used)
                throw ModelFileError(e.line, 1,
                                     "key '" + e.key + "' is not valid for a " +
                                         kind + " model");
    }

private:
    static int first_col(const std::string& raw) {
        std::size_t b = 0;
        while (b < raw.size() && is_space(raw[b])) ++b;
        return static_cast<int>(b) + 1;
    }

    void normalize_key(RawEntry& e) const {
        if (e.key.rfind("param", 0) == 0 &&
            (e.key.size() == 5 || is_space(e.key[5]))) {
            const std::string name = trim(e.key.substr(5));
            if (!valid_identifier(name))
                throw ModelFileError(e.line, 1,
                                     "'" + name + "' is not a valid parameter name");
            static const std::set<std::string> reserved = {
                "x", "y", "z", "exp", "ln", "sqrt", "sin", "cos"};
            if (reserved.count(name))
                throw ModelFileError(e.line, 1,
                                     "parameter name '" + name +
                                         "' collides with a coordinate or "
                                         "function name");
            e.key = "param " + name;
            return;
        }
        if (!known_keys().count(e.key))
            throw ModelFileError(e.line, 1, "unknown key '" + e.key + "'");
    }

    mutable std::vector<RawEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

template <std::size_t N>
[[nodiscard]] std::array<Expr, N> expr_list(const RawEntry& e,
                                            const std::set<std::string>& params) {
    const std::vector<Piece> pieces = split_list(e);
    if (pieces.size() != N)
        throw ModelFileError(e.line, e.value_col,
                             "key '" + e.key + "' needs " + std::to_string(N) +
                                 " comma-separated expressions, got " +
                                 std::to_string(pieces.size()));
    std::array<Expr, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = parse_expression(pieces[i], e.line, params);
    return out;
}

[[nodiscard]] inline std::array<double, 3> number_list3(const RawEntry& e) {
    const std::vector<Piece> pieces = split_list(e);
    if (pieces.size() != 3)
        throw ModelFileError(e.line, e.value_col,
                             "key '" + e.key + "' needs 3 comma-separated "
                                               "numbers, got " +
                                 std::to_string(pieces.size()));
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = parse_number(pieces[i], e.line, false);
    return out;
}

[[nodiscard]] inline Interval parse_interval(const RawEntry& e) {
    const std::size_t dots = e.value.find("..");
    if (dots == std::string::npos)
        throw ModelFileError(e.line, e.value_col,
                             "expected 'lo .. hi' (use inf for an unbounded "
                             "side)");
    Interval iv;
    iv.lo = parse_number({trim(e.value.substr(0, dots)), e.value_col}, e.line,
                         true);
    std::size_t rb = dots + 2;
    while (rb < e.value.size() && is_space(e.value[rb])) ++rb;
    iv.hi = parse_number({trim(e.value.substr(dots + 2)),
                          e.value_col + static_cast<int>(rb)},
                         e.line, true);
    if (!(iv.lo < iv.hi))
        throw ModelFileError(e.line, e.value_col,
                             "interval is empty: lo must be < hi");
    return iv;
}

}  // namespace file_detail

/// Parses a model-file document. Throws ModelFileError with a 1-based
/// line/column on any defect.
[[nodiscard]] inline CatalogEntry parse_model_file(const std::string& text) {
    using file_detail::Document;
    using file_detail::RawEntry;
    const Document doc(text);

    const std::string name = doc.require("name").value;
    const RawEntry& kind_entry = doc.require("kind");
    const std::string kind = kind_entry.value;
    if (kind != "framed" && kind != "vertical-field")
        throw ModelFileError(kind_entry.line, kind_entry.value_col,
                             "kind must be 'framed' or 'vertical-field'");

    if (const RawEntry* c = doc.find("coordinates")) {
        std::istringstream in(c->value);
        std::string a, b, d, rest;
        in >> a >> b >> d;
        if (!(a == "x" && b == "y" && d == "z") || (in >> rest))
            throw ModelFileError(c->line, c->value_col,
                                 "coordinates must be 'x y z'");
    }

    std::string note;
    if (const RawEntry* n = doc.find("note")) note = n->value;

    const std::set<std::string> param_names = doc.param_names();
    const Params params = doc.params();

    MetricSpec metric;
    {
        const auto entries = file_detail::expr_list<6>(doc.require("metric"),
                                                       param_names);
        for (int q = 0; q < 6; ++q) metric.entry[q] = entries[q];
    }

    Domain domain;
    static const std::array<const char*, 3> axis_keys = {"domain.x", "domain.y",
                                                         "domain.z"};
    for (int a = 0; a < 3; ++a)
        if (const RawEntry* e = doc.find(axis_keys[a]))
            domain.axis[a] = file_detail::parse_interval(*e);

    Grid grid;
    grid.lo = file_detail::number_list3(doc.require("grid.lo"));
    grid.hi = file_detail::number_list3(doc.require("grid.hi"));
    {
        const RawEntry& e = doc.require("grid.count");
        const std::array<double, 3> n = file_detail::number_list3(e);
        for (int a = 0; a < 3; ++a) {
            if (n[a] < 1 || n[a] != std::floor(n[a]))
                throw ModelFileError(e.line, e.value_col,
                                     "grid counts must be positive integers");
            grid.count[a] = static_cast<int>(n[a]);
        }
    }

    CatalogEntry out;
    out.name = name;
    out.note = note;

    if (kind == "framed") {
        FramedModel m;
        m.name = name;
        m.note = note;
        m.chart.metric = metric;
        m.chart.params = params;
        m.chart.domain = domain;
        m.grid = grid;
        m.chart.frame[0] = file_detail::expr_list<3>(doc.require("frame.e1"),
                                                     param_names);
        m.chart.frame[1] = file_detail::expr_list<3>(doc.require("frame.e2"),
                                                     param_names);
        m.chart.frame[2] = file_detail::expr_list<3>(doc.require("frame.e3"),
                                                     param_names);

        static const std::array<const char*, 4> base_keys = {
            "base.metric", "base.frame.eps1", "base.frame.eps2",
            "base.projection"};
        int have = 0;
        for (const char* k : base_keys)
            if (doc.find(k)) ++have;
        if (have != 0 && have != 4)
            for (const char* k : base_keys)
                if (!doc.find(k))
                    throw ModelFileError(0, 0,
                                         "incomplete base block: missing key '" +
                                             std::string(k) + "'");
        if (have == 4) {
            BaseBlock b;
            b.metric = file_detail::expr_list<3>(doc.require("base.metric"),
                                                 param_names);
            b.frame[0] = file_detail::expr_list<2>(doc.require("base.frame.eps1"),
                                                   param_names);
            b.frame[1] = file_detail::expr_list<2>(doc.require("base.frame.eps2"),
                                                   param_names);
            b.projection = file_detail::expr_list<2>(
                doc.require("base.projection"), param_names);
            m.base = std::move(b);
        }
        if (const RawEntry* c = doc.find("curvature"))
            m.curvature_c = file_detail::parse_number({c->value, c->value_col},
                                                      c->line, false);
        out.model = std::move(m);
    } else {
        VerticalFieldModel v;
        v.name = name;
        v.note = note;
        v.metric = metric;
        v.params = params;
        v.domain = domain;
        v.grid = grid;
        v.vertical = file_detail::expr_list<3>(doc.require("vertical"),
                                               param_names);
        out.model = std::move(v);
    }
    doc.forbid_leftovers(kind);
    return out;
}

/// Reads and parses a model file from disk.
[[nodiscard]] inline CatalogEntry load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ModelFileError(0, 0, "cannot read model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_file(buf.str());
}

/// Writes the canonical document for a model. Refuses models that cannot be
/// represented (rotated frame views, grids with exclusion predicates).
[[nodiscard]] inline std::string serialize_model(const CatalogEntry& e) {
    using file_detail::fmt_num;
    const Grid& grid = e.grid();
    if (grid.exclude)
        throw ModelError(
            "grid exclusion predicates are not representable in model files");
    if (e.is_framed() && e.framed().rotated())
        throw ModelError(
            "a rotated frame view has no expression-level frame; serialize "
            "the original model");
    for (const std::string* s : {&e.name, &e.note})
        if (s->find_first_of("#\n") != std::string::npos)
            throw ModelError("model names and notes must not contain '#' or "
                             "newlines");

    std::ostringstream out;
    auto exprs = [](const auto& list) {
        std::string s;
        for (const Expr& x : list) {
            if (!s.empty()) s += ", ";
            s += x.str();
        }
        return s;
    };
    auto nums = [](const auto& list) {
        std::string s;
        for (double v : list) {
            if (!s.empty()) s += ", ";
            s += fmt_num(v);
        }
        return s;
    };

    out << "name = " << e.name << "\n";
    out << "kind = " << e.kind() << "\n";
    if (!e.note.empty()) out << "note = " << e.note << "\n";
    out << "coordinates = x y z\n";

    const Params& params =
        e.is_framed() ? e.framed().chart.params : e.vertical().params;
    for (const auto& [k, v] : params)
        out << "param " << k << " = " << fmt_num(v) << "\n";

    const MetricSpec& metric =
        e.is_framed() ? e.framed().chart.metric : e.vertical().metric;
    out << "metric = " << exprs(metric.entry) << "\n";

    if (e.is_framed()) {
        const FramedModel& m = e.framed();
        for (int i = 0; i < 3; ++i)
            out << "frame.e" << i + 1 << " = " << exprs(m.chart.frame[i])
                << "\n";
        if (m.base) {
            out << "base.metric = " << exprs(m.base->metric) << "\n";
            out << "base.frame.eps1 = " << exprs(m.base->frame[0]) << "\n";
            out << "base.frame.eps2 = " << exprs(m.base->frame[1]) << "\n";
            out << "base.projection = " << exprs(m.base->projection) << "\n";
        }
        if (m.curvature_c)
            out << "curvature = " << fmt_num(*m.curvature_c) << "\n";
    } else {
        out << "vertical = " << exprs(e.vertical().vertical) << "\n";
    }

    const Domain& domain =
        e.is_framed() ? e.framed().chart.domain : e.vertical().domain;
    static const std::array<const char*, 3> axis_keys = {"domain.x", "domain.y",
                                                         "domain.z"};
    for (int a = 0; a < 3; ++a) {
        const Interval& iv = domain.axis[a];
        if (std::isinf(iv.lo) && std::isinf(iv.hi)) continue;
        out << axis_keys[a] << " = " << fmt_num(iv.lo) << " .. "
            << fmt_num(iv.hi) << "\n";
    }

    out << "grid.lo = " << nums(grid.lo) << "\n";
    out << "grid.hi = " << nums(grid.hi) << "\n";
    out << "grid.count = " << nums(grid.count) << "\n";
    return out.str();
}

}  // namespace bisub
