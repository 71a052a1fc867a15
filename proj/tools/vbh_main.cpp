#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vbh/scenario.hpp"

namespace {

using namespace vbh;

int shared_context(const std::string& a, const std::string& b, int nv, int nd,
                   int& out_nv, int& out_nd) {
    if (nd <= 0) {
        int n = std::max(vbh::detail::scan_max_index(a),
                         b.empty() ? 1 : vbh::detail::scan_max_index(b));
        out_nd = n;
        out_nv = nv > 0 ? nv : 2 * n;
    } else {
        out_nd = nd;
        out_nv = nv > 0 ? nv : 2 * nd;
    }
    if (out_nv < out_nd) out_nv = out_nd;
    return 0;
}

int cmd_expr_eval(const std::string& text, int nv, int nd) {
    int cnv = 0, cnd = 0;
    shared_context(text, "", nv, nd, cnv, cnd);
    std::cout << expr_str(parse_expr(text, cnv, cnd)) << "\n";
    return 0;
}

LocalFunctional as_functional(const ExprValue& v, const std::string& which) {
    if (std::holds_alternative<LocalFunctional>(v)) return std::get<LocalFunctional>(v);
    if (std::holds_alternative<DiffPoly>(v))
        return functional_of(std::get<DiffPoly>(v));
    fail(ErrorKind::ValidationError, which + " must be a local functional or a density");
}

int cmd_expr_bracket(const std::string& a, const std::string& b, int nv, int nd) {
    int cnv = 0, cnd = 0;
    shared_context(a, b, nv, nd, cnv, cnd);
    LocalFunctional fa = as_functional(parse_expr(a, cnv, cnd), "the first argument");
    LocalFunctional fb = as_functional(parse_expr(b, cnv, cnd), "the second argument");
    std::cout << expr_str(ExprValue(schouten(fa, fb))) << "\n";
    return 0;
}

int cmd_atlas(const std::string& space, int n, int pmax, int dmax) {
    MonomialAtlas at = atlas(space, n, pmax, dmax);
    std::cout << at.space << " n=" << at.n << " box=(" << at.p_max << "," << at.d_max
              << ")\n";
    for (const auto& b : at.occupied) std::cout << "(" << b.p << "," << b.d << ")\n";
    return 0;
}

int cmd_window(int n, int p, int d) {
    std::cout << "window: " << to_string(omega_lambda_window(n, p, d)) << "\n";
    std::cout << "guaranteed-zero: " << (vbh_guaranteed_zero(n, p, d) ? "true" : "false")
              << "\n";
    return 0;
}

int cmd_verify(const std::string& path, int udeg_bound, const std::string& json_out,
               bool list_only) {
    Scenario sc = Scenario::load(path);
    if (list_only) {
        for (size_t k = 0; k < sc.tasks.size(); ++k) {
            const auto& t = sc.tasks[k];
            std::cout << (k + 1) << ". " << t.kind;
            if (!t.name.empty()) std::cout << " (" << t.name << ")";
            if (t.group != "main") std::cout << " [group " << t.group << "]";
            std::cout << "\n";
        }
        return 0;
    }
    RunOptions opt;
    opt.udeg_bound = udeg_bound;
    Report rep = run_scenario(sc, opt);
    std::cout << "scenario: " << rep.scenario << "\n" << rep.summary_text();
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) fail(ErrorKind::ValidationError, "cannot write report to '" + json_out + "'");
        out << rep.to_json().dump(2) << "\n";
    }
    return rep.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact symbolic calculus for diagonal bihamiltonian pencils"};
    app.require_subcommand(1);

    std::string path, json_out;
    int udeg_bound = 3;
    bool list_only = false;
    auto* verify = app.add_subcommand("verify", "run a scenario file and report the results");
    verify->add_option("scenario", path, "scenario JSON file")->required();
    verify->add_option("--udeg-bound", udeg_bound,
                       "default coefficient degree bound for probe tasks");
    verify->add_option("--json", json_out, "write the machine-readable report here");
    verify->add_flag("--list", list_only, "print the task inventory without executing");

    auto* expr = app.add_subcommand("expr", "expression utilities");
    expr->require_subcommand(1);
    std::string text_a, text_b;
    int nv = 0, nd = 0;
    auto* eval = expr->add_subcommand("eval", "parse an expression and print its canonical form");
    eval->add_option("expression", text_a, "expression text")->required();
    eval->add_option("--nv", nv, "total symbol count (default: inferred)");
    eval->add_option("--nd", nd, "dynamic coordinate count (default: inferred)");
    auto* bracket = expr->add_subcommand("bracket", "bracket of two local functionals");
    bracket->add_option("a", text_a, "first functional")->required();
    bracket->add_option("b", text_b, "second functional")->required();
    bracket->add_option("--nv", nv, "total symbol count (default: inferred)");
    bracket->add_option("--nd", nd, "dynamic coordinate count (default: inferred)");

    std::string space;
    int n = 1, p = 0, d = 0, pmax = 0, dmax = 0;
    auto* atlasc = app.add_subcommand("atlas", "bidegree atlas of a graded monomial space");
    atlasc->add_option("space", space, "space identifier")->required();
    atlasc->add_option("n", n, "coordinate count")->required();
    atlasc->add_option("p-max", pmax, "theta-degree bound")->required();
    atlasc->add_option("d-max", dmax, "x-degree bound")->required();

    auto* windowc = app.add_subcommand("window", "classify a bidegree for the pencil complex");
    windowc->add_option("n", n, "coordinate count")->required();
    windowc->add_option("p", p, "theta degree")->required();
    windowc->add_option("d", d, "x degree")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(verify))
            return cmd_verify(path, udeg_bound, json_out, list_only);
        if (app.got_subcommand(expr)) {
            if (expr->got_subcommand(eval)) return cmd_expr_eval(text_a, nv, nd);
            return cmd_expr_bracket(text_a, text_b, nv, nd);
        }
        if (app.got_subcommand(atlasc)) return cmd_atlas(space, n, pmax, dmax);
        if (app.got_subcommand(windowc)) return cmd_window(n, p, d);
    } catch (const vbh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
