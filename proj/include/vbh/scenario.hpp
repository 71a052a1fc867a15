#pragma once

#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbh/bihss.hpp"
#include "vbh/cohomolab.hpp"
#include "vbh/expr.hpp"

namespace vbh {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scenario documents.
//
// A scenario is a JSON file: a structure block (the coordinate count, the
// metric entries, optional scaling constants, optional default central
// invariant candidates) followed by an ordered task list. Tasks may carry a
// "name" so later tasks can reference their output as "@name", and a "group"
// (default "main"); a hard error aborts the remaining tasks of its group.

struct ScenarioTask {
    std::string kind;
    std::string name;  // empty unless the output is referenced later
    std::string group = "main";
    ojson params = ojson::object(); // task-specific keys
    ojson expect;                   // optional expectations (null when absent)
};

struct ConformalBlock {
    std::vector<Rat> d;
    Rat lambda0, lambda1, mu;
};

struct Scenario {
    int version = 1;
    std::string name;
    int n = 0;
    int constants = 0; // extra free symbols C[1..constants]
    std::vector<std::string> f;
    std::optional<ConformalBlock> conformal;
    std::vector<std::string> c; // default central-invariant candidates

    std::vector<ScenarioTask> tasks;

    static Scenario from_json(const ojson& doc);
    static Scenario load(const std::string& path);
};

struct TaskResult {
    std::string kind, name, group;
    std::string status; // pass | fail | error | skipped
    ojson output;
    std::string error; // "Kind: detail" when status == error
    long long ms = 0;
};

struct Report {
    std::string scenario;
    std::string structure_status = "ok"; // ok | error
    std::string structure_error;
    std::vector<TaskResult> tasks;

    int count(const std::string& status) const {
        int k = 0;
        for (const auto& t : tasks)
            if (t.status == status) ++k;
        return k;
    }
    bool all_passed() const {
        return structure_status == "ok" && count("pass") == static_cast<int>(tasks.size());
    }
    int exit_code() const { return all_passed() ? 0 : 1; }

    ojson to_json(bool with_timing = true) const {
        ojson j;
        j["version"] = 1;
        j["scenario"] = scenario;
        j["structure"]["status"] = structure_status;
        if (!structure_error.empty()) j["structure"]["error"] = structure_error;
        j["tasks"] = ojson::array();
        for (const auto& t : tasks) {
            ojson r;
            r["task"] = t.kind;
            if (!t.name.empty()) r["name"] = t.name;
            if (t.group != "main") r["group"] = t.group;
            r["status"] = t.status;
            if (!t.output.is_null()) r["output"] = t.output;
            if (!t.error.empty()) r["error"] = t.error;
            if (with_timing) r["ms"] = t.ms;
            j["tasks"].push_back(std::move(r));
        }
        j["summary"] = {{"pass", count("pass")},
                        {"fail", count("fail")},
                        {"error", count("error")},
                        {"skipped", count("skipped")},
                        {"exit", exit_code()}};
        return j;
    }

    std::string summary_text() const {
        std::string out;
        if (structure_status != "ok")
            out += "structure: error (" + structure_error + ")\n";
        for (const auto& t : tasks) {
            out += "[" + t.status + "] " + t.kind;
            if (!t.name.empty()) out += " (" + t.name + ")";
            if (t.status == "error") out += ": " + t.error;
            out += "\n";
        }
        out += "pass " + std::to_string(count("pass")) + ", fail " +
               std::to_string(count("fail")) + ", error " + std::to_string(count("error")) +
               ", skipped " + std::to_string(count("skipped")) + "\n";
        return out;
    }
};

struct RunOptions {
    int udeg_bound = 3; // default coefficient degree bound for probes
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& msg) {
    fail(ErrorKind::ValidationError, msg);
}

inline Rat rat_of(const ojson& j, const std::string& where) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) {
        try {
            Rat q(j.get<std::string>());
            q.canonicalize();
            return q;
        } catch (const std::exception&) {
            invalid(where + ": not a rational literal");
        }
    }
    invalid(where + ": expected an integer or a rational string");
}

inline std::string expr_text(const ojson& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long>());
    invalid(where + ": expected an expression string");
}

inline int int_of(const ojson& j, const std::string& where) {
    if (!j.is_number_integer()) invalid(where + ": expected an integer");
    return j.get<int>();
}

inline const std::set<std::string>& task_kinds() {
    static const std::set<std::string> kinds = {
        "check-bihamiltonian", "schouten", "derivation", "lie",
        "indices", "tau", "normalize", "conformal",
        "euler", "central-invariants", "delta-minus-one", "window",
        "atlas", "probe"};
    return kinds;
}

} // namespace detail

inline Scenario Scenario::from_json(const ojson& doc) {
    Scenario sc;
    if (!doc.is_object()) detail::invalid("scenario document must be an object");
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<int>() != 1)
        detail::invalid("unsupported scenario version");
    if (!doc.contains("name") || !doc["name"].is_string())
        detail::invalid("scenario needs a name");
    sc.name = doc["name"].get<std::string>();

    if (!doc.contains("structure") || !doc["structure"].is_object())
        detail::invalid("scenario needs a structure block");
    const auto& st = doc["structure"];
    sc.n = detail::int_of(st.value("n", ojson()), "structure.n");
    if (sc.n < 1) detail::invalid("structure.n must be positive");
    if (st.contains("constants")) {
        sc.constants = detail::int_of(st["constants"], "structure.constants");
        if (sc.constants < 0) detail::invalid("structure.constants must be nonnegative");
    }
    if (!st.contains("f") || !st["f"].is_array() ||
        static_cast<int>(st["f"].size()) != sc.n)
        detail::invalid("structure.f must list one entry per coordinate");
    for (const auto& e : st["f"]) sc.f.push_back(detail::expr_text(e, "structure.f"));
    if (st.contains("conformal")) {
        const auto& cf = st["conformal"];
        if (!cf.is_object() || !cf.contains("d") || !cf["d"].is_array() ||
            static_cast<int>(cf["d"].size()) != sc.n)
            detail::invalid("structure.conformal needs d with one entry per coordinate");
        ConformalBlock cb;
        for (const auto& e : cf["d"]) cb.d.push_back(detail::rat_of(e, "conformal.d"));
        cb.lambda0 = detail::rat_of(cf.value("lambda0", ojson()), "conformal.lambda0");
        cb.lambda1 = detail::rat_of(cf.value("lambda1", ojson()), "conformal.lambda1");
        cb.mu = detail::rat_of(cf.value("mu", ojson()), "conformal.mu");
        sc.conformal = std::move(cb);
    }
    if (st.contains("c")) {
        if (!st["c"].is_array() || static_cast<int>(st["c"].size()) != sc.n)
            detail::invalid("structure.c must list one entry per coordinate");
        for (const auto& e : st["c"]) sc.c.push_back(detail::expr_text(e, "structure.c"));
    }

    if (!doc.contains("tasks") || !doc["tasks"].is_array())
        detail::invalid("scenario needs a task list");
    std::set<std::string> names;
    for (const auto& tj : doc["tasks"]) {
        if (!tj.is_object()) detail::invalid("each task must be an object");
        ScenarioTask t;
        if (!tj.contains("task") || !tj["task"].is_string())
            detail::invalid("each task needs a task kind");
        t.kind = tj["task"].get<std::string>();
        if (!detail::task_kinds().count(t.kind))
            detail::invalid("unknown task kind '" + t.kind + "'");
        if (tj.contains("name")) {
            if (!tj["name"].is_string()) detail::invalid("task names must be strings");
            t.name = tj["name"].get<std::string>();
            if (t.name.empty() || t.name[0] == '@')
                detail::invalid("task names must be nonempty and unprefixed");
            if (!names.insert(t.name).second)
                detail::invalid("duplicate task name '" + t.name + "'");
        }
        if (tj.contains("group")) {
            if (!tj["group"].is_string()) detail::invalid("task groups must be strings");
            t.group = tj["group"].get<std::string>();
        }
        if (tj.contains("expect")) t.expect = tj["expect"];
        for (auto it = tj.begin(); it != tj.end(); ++it) {
            if (it.key() == "task" || it.key() == "name" || it.key() == "group" ||
                it.key() == "expect")
                continue;
            t.params[it.key()] = it.value();
        }
        // references must point at outputs named by earlier tasks
        for (auto it = t.params.begin(); it != t.params.end(); ++it) {
            if (it.value().is_string()) {
                const std::string& s = it.value().get_ref<const std::string&>();
                if (!s.empty() && s[0] == '@' && !names.count(s.substr(1)))
                    detail::invalid("reference '" + s + "' does not resolve");
            }
        }
        sc.tasks.push_back(std::move(t));
    }
    return sc;
}

inline Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::invalid("cannot open scenario file '" + path + "'");
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const std::exception& e) {
        detail::invalid(std::string("scenario is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

// ---------------------------------------------------------------------------
// Execution.

namespace detail {

class ScenarioRunner {
public:
    ScenarioRunner(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt) {}

    Report run() {
        Report rep;
        rep.scenario = sc_.name;
        try {
            build_structure();
        } catch (const Error& e) {
            rep.structure_status = "error";
            rep.structure_error = e.what();
            for (const auto& t : sc_.tasks)
                rep.tasks.push_back({t.kind, t.name, t.group, "skipped", {}, "", 0});
            return rep;
        }
        prevalidate();

        std::set<std::string> aborted;
        for (const auto& t : sc_.tasks) {
            TaskResult r{t.kind, t.name, t.group, "pass", {}, "", 0};
            if (aborted.count(t.group)) {
                r.status = "skipped";
                rep.tasks.push_back(std::move(r));
                continue;
            }
            auto t0 = std::chrono::steady_clock::now();
            try {
                if (!dispatch(t, r.output)) r.status = "fail";
            } catch (const Error& e) {
                r.status = "error";
                r.error = e.what();
                aborted.insert(t.group);
            } catch (const std::exception& e) {
                r.status = "error";
                r.error = std::string("ValidationError: ") + e.what();
                aborted.insert(t.group);
            }
            r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
            rep.tasks.push_back(std::move(r));
        }
        return rep;
    }

private:
    const Scenario& sc_;
    RunOptions opt_;
    int nv_ = 0;
    std::vector<BaseScalar> f_;
    std::optional<SemisimpleHydroPair> S_;
    std::optional<ConformalData> cd_;
    std::vector<BaseScalar> cdef_;
    std::map<std::string, ExprValue> named_;

    const SemisimpleHydroPair& S() const { return *S_; }

    void build_structure() {
        nv_ = sc_.n + sc_.constants;
        for (const auto& text : sc_.f) f_.push_back(eval_base_raw(text));
        S_ = build_pair(f_);
        if (sc_.conformal)
            cd_ = ConformalData{sc_.conformal->d, sc_.conformal->lambda0,
                                sc_.conformal->lambda1, sc_.conformal->mu};
        for (const auto& text : sc_.c) cdef_.push_back(eval_base_raw(text));
    }

    // every expression (except references, which resolve during dispatch)
    // must parse before any task runs
    void prevalidate() const {
        for (size_t k = 0; k < sc_.tasks.size(); ++k) {
            const auto& t = sc_.tasks[k];
            auto probe_text = [&](const ojson& j) {
                if (!j.is_string()) return;
                const std::string& s = j.get_ref<const std::string&>();
                if (s.empty() || s[0] == '@') return;
                if (s == "P0" || s == "P1" || s == "euler") return;
                try {
                    parse_expr(s, nv_, sc_.n, S().roots);
                } catch (const Error& e) {
                    if (e.kind() == ErrorKind::SyntaxError ||
                        e.kind() == ErrorKind::IndexOutOfRange)
                        invalid("task " + std::to_string(k + 1) + " (" + t.kind +
                                "): expression '" + s + "' does not parse: " + e.what());
                    throw;
                }
            };
            static const std::set<std::string> expr_keys = {
                "a", "b", "of", "apply", "form", "field", "rhs", "hamiltonian"};
            for (auto it = t.params.begin(); it != t.params.end(); ++it) {
                if (expr_keys.count(it.key())) probe_text(it.value());
                if (it.key() == "c" && it.value().is_array())
                    for (const auto& e : it.value()) probe_text(e);
            }
            if (t.expect.is_string()) probe_text(t.expect);
            if (t.expect.is_array())
                for (const auto& e : t.expect) probe_text(e);
        }
    }

    // --- evaluation helpers ------------------------------------------------

    BaseScalar eval_base_raw(const std::string& text) const {
        ExprValue v = parse_expr(text, nv_, sc_.n, S_ ? S_->roots : RootRegistry());
        if (!std::holds_alternative<DiffPoly>(v))
            invalid("'" + text + "' is not a scalar expression");
        const DiffPoly& p = std::get<DiffPoly>(v);
        Scalar acc = Scalar::constant(nv_, sc_.n, Rat(0));
        for (const Term& t : p.terms) {
            if (!t.even.empty() || !t.odd.empty() || !t.logs.empty())
                invalid("'" + text + "' is not jet-free");
            acc = acc + t.c;
        }
        return acc.to_base();
    }

    ExprValue eval(const std::string& text) const {
        if (!text.empty() && text[0] == '@') {
            auto it = named_.find(text.substr(1));
            if (it == named_.end()) invalid("reference '" + text + "' does not resolve");
            return it->second;
        }
        return parse_expr(text, nv_, sc_.n, S().roots);
    }

    ExprValue eval(const ojson& j, const std::string& where) const {
        return eval(expr_text(j, where));
    }

    LocalFunctional eval_functional(const ojson& j, const std::string& where) const {
        std::string text = expr_text(j, where);
        if (text == "P0") return S().P0();
        if (text == "P1") return S().P1();
        ExprValue v = eval(text);
        if (std::holds_alternative<LocalFunctional>(v)) return std::get<LocalFunctional>(v);
        if (std::holds_alternative<DiffPoly>(v) && std::get<DiffPoly>(v).is_zero())
            return LocalFunctional(DiffPoly(nv_, sc_.n));
        invalid(where + ": expected a local functional (int of a density)");
    }

    ReducedOneForm eval_reduced(const ojson& j, const std::string& where) const {
        ExprValue v = eval(j, where);
        if (std::holds_alternative<ReducedOneForm>(v)) return std::get<ReducedOneForm>(v);
        if (std::holds_alternative<OneForm>(v))
            return reduce_mod_dx(std::get<OneForm>(v));
        if (std::holds_alternative<DiffPoly>(v) && std::get<DiffPoly>(v).is_zero())
            return ReducedOneForm(nv_, sc_.n);
        invalid(where + ": expected a one-form");
    }

    DiffPoly eval_poly(const ojson& j, const std::string& where) const {
        ExprValue v = eval(j, where);
        if (!std::holds_alternative<DiffPoly>(v))
            invalid(where + ": expected a jet-ring expression");
        return std::get<DiffPoly>(v);
    }

    std::vector<BaseScalar> eval_candidates(const ScenarioTask& t) const {
        std::vector<BaseScalar> c;
        if (t.params.contains("c")) {
            const auto& arr = t.params["c"];
            if (!arr.is_array() || static_cast<int>(arr.size()) != sc_.n)
                invalid(t.kind + ".c must list one entry per coordinate");
            for (const auto& e : arr) c.push_back(eval_base_raw(expr_text(e, t.kind + ".c")));
            return c;
        }
        if (!cdef_.empty()) return cdef_;
        invalid(t.kind + " needs candidate functions (task c or structure c)");
    }

    EvDerivation eval_field(const ojson& j, const std::string& where) const {
        std::string text = expr_text(j, where);
        if (text == "P0") return S().D0;
        if (text == "P1") return S().D1;
        if (text == "euler") {
            require_conformal(where);
            return euler_field(S(), *cd_);
        }
        return derivation_of(eval_functional(j, where));
    }

    void require_conformal(const std::string& who) const {
        if (!cd_) invalid(who + " needs a structure.conformal block");
    }

    // --- expectation helpers -----------------------------------------------

    static bool match_flag(const ojson& expect, const std::string& key, bool actual, bool& ok) {
        if (!expect.is_object() || !expect.contains(key)) return false;
        if (!expect[key].is_boolean()) invalid("expect." + key + " must be a boolean");
        if (expect[key].get<bool>() != actual) ok = false;
        return true;
    }
    static bool match_int(const ojson& expect, const std::string& key, long actual, bool& ok) {
        if (!expect.is_object() || !expect.contains(key)) return false;
        if (!expect[key].is_number_integer()) invalid("expect." + key + " must be an integer");
        if (expect[key].get<long>() != actual) ok = false;
        return true;
    }

    bool match_scalar_list(const ojson& expect, const IndexVector& actual) const {
        if (!expect.is_array() || static_cast<int>(expect.size()) != sc_.n)
            invalid("expected-value list needs one entry per coordinate");
        for (int i = 0; i < sc_.n; ++i)
            if (!(eval_base_raw(expr_text(expect[i], "expect")) == actual[i])) return false;
        return true;
    }

    bool match_rat_list(const ojson& expect, const std::vector<Rat>& actual) const {
        if (!expect.is_array() || expect.size() != actual.size())
            invalid("expected-value list has the wrong length");
        for (size_t i = 0; i < actual.size(); ++i)
            if (rat_of(expect[i], "expect") != actual[i]) return false;
        return true;
    }

    bool match_reduced(const ojson& expect, const ReducedOneForm& actual) const {
        return eval_reduced(expect, "expect") == actual;
    }

    // --- task dispatch -----------------------------------------------------

    bool dispatch(const ScenarioTask& t, ojson& out) {
        bool ok = true;
        if (t.kind == "check-bihamiltonian") {
            bool bh = is_bihamiltonian(S().P0(), S().P1());
            out["bihamiltonian"] = bh;
            ok = bh;
        } else if (t.kind == "schouten") {
            LocalFunctional a = eval_functional(t.params.value("a", ojson()), "schouten.a");
            LocalFunctional b = eval_functional(t.params.value("b", ojson()), "schouten.b");
            LocalFunctional br = schouten(a, b);
            remember(t, ExprValue(br));
            out["bracket"] = expr_str(ExprValue(br));
            if (!t.expect.is_null())
                ok = (br == eval_functional(t.expect, "expect"));
        } else if (t.kind == "derivation") {
            EvDerivation X =
                eval_field(t.params.value("hamiltonian", ojson()), "derivation.hamiltonian");
            DiffPoly img = X.apply(eval_poly(t.params.value("apply", ojson()), "derivation.apply"));
            remember(t, ExprValue(img));
            out["image"] = img.str();
            if (!t.expect.is_null()) ok = (img == eval_poly(t.expect, "expect"));
        } else if (t.kind == "lie") {
            EvDerivation X = eval_field(t.params.value("field", ojson()), "lie.field");
            ExprValue form = eval(t.params.value("form", ojson()), "lie.form");
            if (std::holds_alternative<OneForm>(form)) {
                OneForm img = lie_derivative(X, std::get<OneForm>(form));
                remember(t, ExprValue(img));
                out["image"] = img.str();
                if (!t.expect.is_null()) {
                    ExprValue e = eval(t.expect, "expect");
                    ok = std::holds_alternative<OneForm>(e) && std::get<OneForm>(e) == img;
                }
            } else {
                ReducedOneForm img =
                    lie_derivative(X, eval_reduced(t.params.value("form", ojson()), "lie.form"));
                remember(t, ExprValue(img));
                out["image"] = img.str();
                if (!t.expect.is_null()) ok = match_reduced(t.expect, img);
            }
        } else if (t.kind == "indices") {
            ReducedOneForm w = eval_reduced(t.params.value("of", ojson()), "indices.of");
            IndexVector iv = indices(S(), w);
            ojson arr = ojson::array();
            for (const auto& s : iv) arr.push_back(s.str());
            out["indices"] = arr;
            if (!t.expect.is_null()) ok = match_scalar_list(t.expect, iv);
        } else if (t.kind == "tau") {
            ReducedOneForm tau = build_tau(S(), eval_candidates(t));
            remember(t, ExprValue(tau));
            out["tau"] = tau.str();
            out["cocycle"] = is_cocycle(S(), tau);
            if (!t.expect.is_null()) ok = match_reduced(t.expect, tau);
        } else if (t.kind == "normalize") {
            ReducedOneForm w = eval_reduced(t.params.value("of", ojson()), "normalize.of");
            NormalizeResult nr = normalize_cocycle(S(), w);
            remember(t, ExprValue(nr.omega));
            out["omega"] = nr.omega.str();
            if (!t.expect.is_null()) ok = match_reduced(t.expect, nr.omega);
        } else if (t.kind == "conformal") {
            std::vector<Rat> d = conformal_check(f_);
            ojson arr = ojson::array();
            for (const Rat& q : d) arr.push_back(rat_str(q));
            out["d"] = arr;
            if (cd_) {
                bool agrees = (d == cd_->d);
                out["matches-declared"] = agrees;
                ok = ok && agrees;
            }
            if (!t.expect.is_null()) ok = ok && match_rat_list(t.expect, d);
        } else if (t.kind == "euler") {
            require_conformal("euler");
            EvDerivation E = euler_field(S(), *cd_);
            ojson us = ojson::array(), ths = ojson::array();
            for (const auto& p : E.u_img) us.push_back(p.str());
            for (const auto& p : E.th_img) ths.push_back(p.str());
            out["u"] = us;
            out["th"] = ths;
            out["mu"] = rat_str(E.mu);
        } else if (t.kind == "central-invariants") {
            require_conformal("central-invariants");
            CentralInvariantLaw law = conformal_central_invariants(*cd_);
            ojson ms = ojson::array();
            for (const Rat& q : law.m) ms.push_back(rat_str(q));
            out["m"] = ms;
            if (t.params.contains("c") || !cdef_.empty()) {
                IndexVector res = index_ode_check(S(), *cd_, eval_candidates(t));
                ojson arr = ojson::array();
                bool vanish = true;
                for (const auto& s : res) {
                    arr.push_back(s.str());
                    vanish = vanish && s.is_zero();
                }
                out["residual"] = arr;
                out["vanishes"] = vanish;
                ok = vanish;
            }
            if (!t.expect.is_null() && t.expect.is_object() && t.expect.contains("m")) {
                std::vector<Rat> got;
                for (const Rat& q : law.m) got.push_back(q);
                ok = ok && match_rat_list(t.expect["m"], got);
            }
        } else if (t.kind == "delta-minus-one") {
            ExprValue v = eval(t.params.value("of", ojson()), "delta-minus-one.of");
            if (std::holds_alternative<DiffPoly>(v)) {
                DiffPoly img = delta_minus_one(S(), std::get<DiffPoly>(v));
                remember(t, ExprValue(img));
                out["image"] = img.str();
                if (!t.expect.is_null()) ok = (img == eval_poly(t.expect, "expect"));
            } else if (std::holds_alternative<OneForm>(v)) {
                OneForm img = delta_minus_one(S(), std::get<OneForm>(v));
                remember(t, ExprValue(img));
                out["image"] = img.str();
                if (!t.expect.is_null()) {
                    ExprValue e = eval(t.expect, "expect");
                    ok = std::holds_alternative<OneForm>(e) && std::get<OneForm>(e) == img;
                }
            } else {
                invalid("delta-minus-one.of: expected a jet expression or a one-form");
            }
        } else if (t.kind == "window") {
            int p = int_of(t.params.value("p", ojson()), "window.p");
            int d = int_of(t.params.value("d", ojson()), "window.d");
            const char* w = to_string(omega_lambda_window(sc_.n, p, d));
            bool gz = vbh_guaranteed_zero(sc_.n, p, d);
            out["window"] = w;
            out["guaranteed-zero"] = gz;
            if (!t.expect.is_null()) {
                if (t.expect.is_object() && t.expect.contains("window") &&
                    t.expect["window"].get<std::string>() != w)
                    ok = false;
                match_flag(t.expect, "guaranteed-zero", gz, ok);
            }
        } else if (t.kind == "atlas") {
            std::string space = expr_text(t.params.value("space", ojson()), "atlas.space");
            int pmax = int_of(t.params.value("p-max", ojson()), "atlas.p-max");
            int dmax = int_of(t.params.value("d-max", ojson()), "atlas.d-max");
            MonomialAtlas at = atlas(space, sc_.n, pmax, dmax);
            ojson occ = ojson::array();
            for (const auto& b : at.occupied) occ.push_back(ojson::array({b.p, b.d}));
            out["space"] = at.space;
            out["occupied"] = occ;
            if (!t.expect.is_null() && t.expect.is_object()) {
                if (t.expect.contains("occupied") && t.expect["occupied"] != occ) ok = false;
                match_int(t.expect, "count", static_cast<long>(at.occupied.size()), ok);
            }
        } else if (t.kind == "probe") {
            int p = int_of(t.params.value("p", ojson()), "probe.p");
            int d = int_of(t.params.value("d", ojson()), "probe.d");
            AnsatzProblem prob;
            prob.target = Bidegree{p, d};
            prob.udeg_bound = t.params.contains("udeg-bound")
                                  ? int_of(t.params["udeg-bound"], "probe.udeg-bound")
                                  : opt_.udeg_bound;
            std::string mode = t.params.contains("mode")
                                   ? expr_text(t.params["mode"], "probe.mode")
                                   : std::string("kernel");
            if (mode != "kernel" && mode != "member")
                invalid("probe.mode must be 'kernel' or 'member'");
            if (t.params.contains("rhs"))
                prob.rhs = eval_reduced(t.params["rhs"], "probe.rhs");
            else if (mode == "member")
                invalid("probe.mode 'member' needs an rhs");
            AnsatzReport ar = ansatz_solve(
                S(), prob, mode == "kernel" ? AnsatzMode::kernel2 : AnsatzMode::coboundary);
            out["mode"] = mode;
            out["p"] = p;
            out["d"] = d;
            out["udeg-bound"] = ar.udeg_bound;
            out["unknowns"] = ar.unknowns;
            out["equations"] = ar.equations;
            out["scope"] = ar.scope;
            if (mode == "kernel") {
                ojson ker = ojson::array();
                for (const auto& w : ar.kernel) ker.push_back(w.str());
                out["kernel"] = ker;
            } else {
                out["member"] = ar.coboundary;
                if (ar.coboundary) out["witness"] = ar.witness.str();
            }
            if (!t.expect.is_null() && t.expect.is_object()) {
                match_int(t.expect, "kernel-size", static_cast<long>(ar.kernel.size()), ok);
                match_flag(t.expect, "member", ar.coboundary, ok);
                match_int(t.expect, "unknowns", ar.unknowns, ok);
            }
        } else {
            invalid("unknown task kind '" + t.kind + "'");
        }
        return ok;
    }

    void remember(const ScenarioTask& t, ExprValue v) {
        if (!t.name.empty()) named_[t.name] = std::move(v);
    }
};

} // namespace detail

inline Report run_scenario(const Scenario& sc, const RunOptions& opt = {}) {
    return detail::ScenarioRunner(sc, opt).run();
}

inline Report run_scenario(const std::string& path, const RunOptions& opt = {}) {
    return run_scenario(Scenario::load(path), opt);
}

} // namespace vbh
