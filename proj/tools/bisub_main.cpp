// SPDX-License-Identifier: MIT
//
// bisub - command-line front end: catalog listing, grid classification,
// pointwise evaluation, space-form audits and finite-difference
// cross-checks, over built-in models or declarative model files.
//
// Exit codes:
//   0  the requested computation completed with a definitive result
//   2  usage or input error (unknown model, bad flag, defective file,
//      out-of-domain point)
//   3  inconclusive (a structural check failed, or the verdict ladder
//      cannot decide)

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "bisub/harness.hpp"
#include "bisub/model_file.hpp"
#include "bisub/models.hpp"
#include "bisub/report_io.hpp"

namespace {

using namespace bisub;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void print_value(const char* name, double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of a negative zero
    std::printf("%s = %.17g\n", name, v);
}

std::pair<std::string, double> parse_key_value(const std::string& kv,
                                               const char* flag) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw UsageError(std::string(flag) + " expects name=value, got '" + kv +
                         "'");
    const std::string num = kv.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(num.c_str(), &end);
    if (num.empty() || end != num.c_str() + num.size())
        throw UsageError(std::string(flag) + ": '" + num +
                         "' is not a number (in '" + kv + "')");
    return {kv.substr(0, eq), v};
}

CatalogEntry resolve_model(const std::string& spec) {
    for (const CatalogEntry& e : catalog())
        if (e.name == spec) return e;
    if (std::filesystem::exists(spec)) {
        try {
            return load_model_file(spec);
        } catch (const ModelFileError& e) {
            throw UsageError(spec + ": " + e.what());
        }
    }
    std::string msg = "unknown model '" + spec + "': not a built-in (";
    bool first = true;
    for (const std::string& n : builtin_names()) {
        if (!first) msg += ", ";
        msg += n;
        first = false;
    }
    msg += ") and no such file";
    throw UsageError(msg);
}

void apply_params(CatalogEntry& e, const std::vector<std::string>& kvs) {
    if (kvs.empty()) return;
    Params& p = e.is_framed() ? std::get<FramedModel>(e.model).chart.params
                              : std::get<VerticalFieldModel>(e.model).params;
    for (const std::string& kv : kvs) {
        const auto [k, v] = parse_key_value(kv, "--param");
        const auto it = p.find(k);
        if (it == p.end())
            throw UsageError("model '" + e.name + "' declares no parameter '" +
                             k + "'");
        it->second = v;
    }
}

ToleranceSet parse_tolerances(const std::vector<std::string>& kvs) {
    ToleranceSet t;
    for (const std::string& kv : kvs) {
        const auto [k, v] = parse_key_value(kv, "--tol");
        try {
            t.set(k, v);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return t;
}

Grid override_grid(const CatalogEntry& e, const std::vector<int>& counts) {
    Grid g = e.grid();
    if (counts.empty()) return g;
    if (counts.size() != 3) throw UsageError("--grid expects nx,ny,nz");
    for (int a = 0; a < 3; ++a) {
        if (counts[a] < 1) throw UsageError("--grid counts must be >= 1");
        g.count[a] = counts[a];
    }
    return g;
}

ReportFormat format_or_usage(const std::string& s) {
    try {
        return parse_format(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_list(const std::string& format) {
    const ReportFormat f = format_or_usage(format);
    if (f == ReportFormat::Csv)
        throw UsageError("list supports --format text or json");
    if (f == ReportFormat::Json) {
        nlohmann::json out = nlohmann::json::array();
        for (const CatalogEntry& e : catalog())
            out.push_back(
                {{"name", e.name}, {"kind", e.kind()}, {"note", e.note}});
        std::printf("%s\n", out.dump(2).c_str());
    } else {
        for (const CatalogEntry& e : catalog())
            std::printf("%-22s %-15s %s\n", e.name.c_str(), e.kind(),
                        e.note.c_str());
    }
    return 0;
}

int cmd_check(const std::string& spec, const std::vector<int>& grid_counts,
              const std::vector<std::string>& tol_kvs,
              const std::vector<std::string>& param_kvs,
              const std::string& format) {
    const ReportFormat f = format_or_usage(format);
    CatalogEntry e = resolve_model(spec);
    apply_params(e, param_kvs);
    const Grid g = override_grid(e, grid_counts);
    const ToleranceSet t = parse_tolerances(tol_kvs);
    const VerificationReport r =
        e.is_framed() ? classify(e.framed(), g, t) : classify(e.vertical(), g, t);
    std::fputs(render_report(r, f).c_str(), stdout);
    return r.verdict == Verdict::Inconclusive ? 3 : 0;
}

int cmd_at(const std::string& spec, const std::vector<double>& point,
           const std::string& show, const std::vector<std::string>& param_kvs) {
    if (point.size() != 3) throw UsageError("--point expects x,y,z");
    CatalogEntry e = resolve_model(spec);
    apply_params(e, param_kvs);
    const Point p{point[0], point[1], point[2]};

    const auto need_framed = [&]() -> const FramedModel& {
        if (!e.is_framed())
            throw UsageError("--show " + show + " needs a framed model; '" +
                             e.name + "' only declares a vertical field");
        return e.framed();
    };

    if (show == "data") {
        const IntegrabilityData d = integrability_data(need_framed(), p);
        print_value("f1", d.f1);
        print_value("f2", d.f2);
        print_value("kappa1", d.kappa1);
        print_value("kappa2", d.kappa2);
        print_value("sigma", d.sigma);
    } else if (show == "tension") {
        if (e.is_framed()) {
            const std::array<double, 2> t = tension(e.framed(), p);
            print_value("tau1", t[0]);
            print_value("tau2", t[1]);
        } else {
            const VerticalFieldModel& v = e.vertical();
            const std::array<double, 3> h = fiber_mean_curvature(v, p);
            print_value("H1", h[0]);
            print_value("H2", h[1]);
            print_value("H3", h[2]);
            print_value("norm",
                        harness_detail::metric_norm(v.metric, v.params, p, h));
        }
    } else if (show == "bitension") {
        const BitensionResidual r = bitension(need_framed(), p);
        print_value("r1", r.r1);
        print_value("r2", r.r2);
    } else if (show == "curvature") {
        const DataCurvature c = curvature_from_data(need_framed(), p);
        const std::array<double, 7> v = c.values();
        for (int i = 0; i < 7; ++i) print_value(DataCurvature::names()[i], v[i]);
    } else if (show == "jacobi") {
        print_value("jacobi", jacobi_residual(need_framed(), p));
    } else {
        throw UsageError("--show must be one of data, tension, bitension, "
                         "curvature, jacobi");
    }
    return 0;
}

int cmd_audit(const std::string& spec, bool c_given, double c_flag,
              const std::vector<int>& grid_counts,
              const std::vector<std::string>& tol_kvs,
              const std::vector<std::string>& param_kvs,
              const std::string& format) {
    const ReportFormat f = format_or_usage(format);
    CatalogEntry e = resolve_model(spec);
    apply_params(e, param_kvs);
    if (!e.is_framed())
        throw UsageError("audit needs a framed model; '" + e.name +
                         "' only declares a vertical field");
    double c = 0.0;
    if (c_given) {
        c = c_flag;
    } else if (e.framed().curvature_c) {
        c = *e.framed().curvature_c;
    } else {
        throw UsageError("model '" + e.name +
                         "' declares no constant curvature; pass --c");
    }
    const Grid g = override_grid(e, grid_counts);
    const ToleranceSet t = parse_tolerances(tol_kvs);
    const AuditReport a = spaceform_audit(e.framed(), c, g, t);
    std::fputs(render_audit(a, f).c_str(), stdout);
    return 0;
}

int cmd_crosscheck(const std::string& spec, const std::vector<int>& grid_counts,
                   const std::vector<std::string>& tol_kvs,
                   const std::vector<std::string>& param_kvs,
                   const std::string& format) {
    const ReportFormat f = format_or_usage(format);
    CatalogEntry e = resolve_model(spec);
    apply_params(e, param_kvs);
    const Grid g = override_grid(e, grid_counts);
    const ToleranceSet t = parse_tolerances(tol_kvs);
    const FdResult r = e.is_framed() ? fd_crosscheck(e.framed(), g)
                                     : fd_crosscheck(e.vertical(), g);
    std::fputs(render_crosscheck(e.name, r, t.fd, f).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Numerical verification of harmonicity and biharmonicity for "
        "orthonormally framed fibrations of 3-manifolds"};
    app.require_subcommand(1);

    CLI::App* list = app.add_subcommand("list", "List the built-in models");
    std::string list_format = "text";
    list->add_option("--format", list_format, "Output format: text|json");

    struct SweepArgs {
        std::string model;
        std::vector<int> grid;
        std::vector<std::string> tols, params;
        std::string format = "text";
    };
    const auto add_sweep_options = [](CLI::App* cmd, SweepArgs& a) {
        cmd->add_option("model", a.model, "Built-in model name or model file")
            ->required();
        cmd->add_option("--grid", a.grid, "Override grid counts nx,ny,nz")
            ->delimiter(',');
        cmd->add_option("--tol", a.tols, "Override a tolerance, name=value")
            ->take_all();
        cmd->add_option("--param", a.params, "Override a parameter, name=value")
            ->take_all();
        cmd->add_option("--format", a.format, "Output format: text|json|csv");
    };

    CLI::App* check = app.add_subcommand(
        "check", "Classify a model over a grid (verdict ladder)");
    SweepArgs check_args;
    add_sweep_options(check, check_args);

    CLI::App* at =
        app.add_subcommand("at", "Evaluate pointwise quantities, full precision");
    std::string at_model, at_show = "data";
    std::vector<double> at_point;
    std::vector<std::string> at_params;
    at->add_option("model", at_model, "Built-in model name or model file")
        ->required();
    at->add_option("--point", at_point, "Evaluation point x,y,z")
        ->delimiter(',')
        ->required();
    at->add_option("--show", at_show,
                   "Quantity: data|tension|bitension|curvature|jacobi");
    at->add_option("--param", at_params, "Override a parameter, name=value")
        ->take_all();

    CLI::App* audit = app.add_subcommand(
        "audit", "Audit a model against a constant-curvature total space");
    SweepArgs audit_args;
    double audit_c = 0.0;
    add_sweep_options(audit, audit_args);
    CLI::Option* audit_c_opt = audit->add_option(
        "--c", audit_c, "Sectional curvature to audit against");

    CLI::App* crosscheck = app.add_subcommand(
        "crosscheck", "Compare jet derivatives against finite differences");
    SweepArgs cross_args;
    add_sweep_options(crosscheck, cross_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return cmd_list(list_format);
        if (check->parsed())
            return cmd_check(check_args.model, check_args.grid, check_args.tols,
                             check_args.params, check_args.format);
        if (at->parsed()) return cmd_at(at_model, at_point, at_show, at_params);
        if (audit->parsed())
            return cmd_audit(audit_args.model, audit_c_opt->count() > 0, audit_c,
                             audit_args.grid, audit_args.tols, audit_args.params,
                             audit_args.format);
        if (crosscheck->parsed())
            return cmd_crosscheck(cross_args.model, cross_args.grid,
                                  cross_args.tols, cross_args.params,
                                  cross_args.format);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const StructuralError& e) {
        std::fprintf(stderr, "inconclusive: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
