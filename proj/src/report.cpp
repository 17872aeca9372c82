#include "swb/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace swb {

namespace {

double require_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or non-numeric field '" + key + "' in " + where);
    return j[key].get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback) {
    if (j.contains(key)) {
        if (!j[key].is_number()) throw ConfigError("field '" + key + "' must be a number");
        return j[key].get<double>();
    }
    return fallback;
}

Expr parse_expr_field(const Json& model, const std::string& key) {
    if (!model.contains(key) || !model[key].is_string())
        throw ConfigError("custom model requires expression string '" + key + "'");
    try {
        return parse(model[key].get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError("while parsing '" + key + "': " + e.what());
    }
}

Bindings parse_bindings(const Json& model) {
    Bindings b;
    if (!model.contains("params")) return b;
    if (!model["params"].is_object()) throw ConfigError("'params' must be an object");
    for (auto it = model["params"].begin(); it != model["params"].end(); ++it) {
        if (!it.value().is_number())
            throw ConfigError("parameter '" + it.key() + "' must be a number");
        b[it.key()] = it.value().get<double>();
    }
    return b;
}

QuasiSpec parse_quasi(const Json& q) {
    if (!q.is_object() || !q.contains("kind") || !q["kind"].is_string())
        throw ConfigError("'quasi' must be an object with a 'kind' string");
    std::string kind = q["kind"].get<std::string>();
    if (kind == "perfect_square") return QuasiSpec::perfect_square(number_or(q, "lambda", 0.0));
    if (kind == "split_c") return QuasiSpec::split_c(require_number(q, "c", "quasi"));
    if (kind == "general")
        return QuasiSpec::general(require_number(q, "lambda", "quasi"),
                                  require_number(q, "mu", "quasi"));
    throw ConfigError("unknown quasi kind '" + kind +
                      "' (expected perfect_square, split_c, or general)");
}

// default grid for singular-at-zero models: (x_min, L] with x_min = 10 h
Grid standoff_grid(double length, int n) {
    double x_min = 10.0 * length / (n + 11);
    return Grid(x_min, length, n);
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

Json grid_json(const Grid& g) {
    return Json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}};
}

Json provenance(const Grid& g) {
    return Json{{"version", kToolVersion}, {"timestamp", iso_timestamp()}, {"grid", grid_json(g)}};
}

}  // namespace

ModelContext ModelContext::from_config(const Json& config) {
    if (!config.contains("model") || !config["model"].is_object())
        throw ConfigError("config requires a 'model' object");
    const Json& m = config["model"];
    if (!m.contains("name") || !m["name"].is_string())
        throw ConfigError("model requires a 'name' string");
    ModelContext ctx;
    ctx.name_ = m["name"].get<std::string>();

    if (ctx.name_ == "cprs") {
        CPRSChoice ch(number_or(m, "kappa", 0.0), number_or(m, "alpha", 0.0));
        ctx.cprs_ = ch;
        CPRSFamily fam = cprs_family(ch);
        ctx.pair_ = fam.pair;
        ctx.quasi_ = QuasiSpec::perfect_square(ch.epsilon0);
        Expr at = fam.pair.a_tilde;
        ctx.h_plus_mass_ = simplify(at * at);
        ctx.h_plus_potential_ = cprs_potential_route_a(ch);
        ctx.default_grid_ = ch.kappa == 0.0 ? Grid(-10.0, 10.0, 4000) : standoff_grid(12.0, 2000);
        ctx.default_check_grid_ = standoff_grid(12.0, 2000);
        ctx.has_default_grid_ = true;
        // the Swanson view of the cprs builtin: alpha = -beta, a = x^kappa
        double om = ch.omega_tilde + ch.alpha + (-ch.alpha);
        ctx.model_.emplace(SwansonParams(om, ch.alpha, -ch.alpha),
                           LadderSpec{simplify(pow(variable(), ch.kappa)), fam.b_closed, {}});
        return ctx;
    }
    if (ctx.name_ == "isotonic") {
        IsotonicChoice ch;
        ch.alpha = number_or(m, "alpha", 0.0);
        ch.beta = number_or(m, "beta", 0.0);
        ch.c = number_or(m, "c", 0.0);
        ch.d = number_or(m, "d", 1.0);
        double omt = number_or(m, "omega_tilde", 1.0);
        double omega = omt + ch.alpha + ch.beta;
        double lambda = number_or(m, "lambda", 0.0);
        IsotonicFamily fam = isotonic_family(ch, omega, lambda);
        ctx.isotonic_ = ch;
        ctx.isotonic_omega_ = omega;
        ctx.model_ = fam.model;
        ctx.pair_ = fam.pair;
        ctx.quasi_ = QuasiSpec::perfect_square(lambda);
        ctx.default_grid_ = standoff_grid(12.0, 2000);
        ctx.has_default_grid_ = true;
        return ctx;
    }
    if (ctx.name_ == "custom") {
        double omega = require_number(m, "omega", "model");
        double alpha = require_number(m, "alpha", "model");
        double beta = require_number(m, "beta", "model");
        Expr a = parse_expr_field(m, "a");
        Expr b = parse_expr_field(m, "b");
        Bindings params = parse_bindings(m);
        try {
            ctx.model_.emplace(SwansonParams(omega, alpha, beta), LadderSpec{a, b, params});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (m.contains("b1") || m.contains("b2") || m.contains("quasi")) {
            Expr b1 = parse_expr_field(m, "b1");
            Expr b2 = parse_expr_field(m, "b2");
            if (!m.contains("quasi")) throw ConfigError("custom pair requires 'quasi'");
            try {
                ctx.quasi_ = parse_quasi(m["quasi"]);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            ctx.pair_ = FactorPair{ctx.model_->a_tilde(), b1, b2, params};
        }
        return ctx;
    }
    throw ConfigError("unknown model name '" + ctx.name_ +
                      "' (expected cprs, isotonic, or custom)");
}

Grid ModelContext::resolve_grid(const Json& config, GridPurpose purpose) const {
    if (!config.contains("grid")) {
        if (!has_default_grid_)
            throw ConfigError("custom models require a 'grid' block {x_min, x_max, n}");
        if (purpose == GridPurpose::Checks && default_check_grid_) return *default_check_grid_;
        return default_grid_;
    }
    const Json& g = config["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object {x_min, x_max, n}");
    double x_min = require_number(g, "x_min", "grid");
    double x_max = require_number(g, "x_max", "grid");
    double n = require_number(g, "n", "grid");
    if (n != std::floor(n) || n < 3) throw ConfigError("grid 'n' must be an integer >= 3");
    if (!(x_min < x_max)) throw ConfigError("grid requires x_min < x_max");
    return Grid(x_min, x_max, static_cast<int>(n));
}

const SwansonModel& ModelContext::model() const {
    if (!model_) throw ConfigError("this command requires a Swanson model");
    return *model_;
}
const FactorPair& ModelContext::pair() const {
    if (!pair_) throw ConfigError("this command requires a factor pair (b1, b2, quasi)");
    return *pair_;
}
const QuasiSpec& ModelContext::quasi() const {
    if (!quasi_) throw ConfigError("this command requires a quasi-Hamiltonian classification");
    return *quasi_;
}

BandedOperator ModelContext::h_plus(const Grid& g) const {
    if (h_plus_mass_)
        return sturm_liouville_matrix(*h_plus_mass_, sample(*h_plus_potential_, g), g);
    if (pair_) return build_triplet(*pair_, quasi()).matrix_plus(g);
    return model().hermitian_matrix(g);
}
BandedOperator ModelContext::h_bar(const Grid& g) const {
    return build_triplet(pair(), quasi()).matrix_bar(g);
}
BandedOperator ModelContext::h_minus(const Grid& g) const {
    return build_triplet(pair(), quasi()).matrix_minus(g);
}

const std::vector<std::pair<std::string, std::optional<double>>>& check_registry() {
    static const std::vector<std::pair<std::string, std::optional<double>>> reg = {
        {"metric", 1e-3},
        {"commutator", 1e-3},
        {"constraint", std::nullopt},
        {"intertwine", 1e-3},
        {"quasi", 1e-3},
        {"nilpotency", 1e-14},
        {"pseudo_adjoint", 1e-13},
        {"pseudo_intertwine", 1e-3},
        {"pseudo_quasi", 1e-3},
    };
    return reg;
}

namespace {

std::optional<double> check_threshold(const std::string& name) {
    for (const auto& [n, t] : check_registry())
        if (n == name) return t;
    throw ConfigError("unknown check '" + name + "' (see the check registry)");
}

Json run_one_check(const std::string& name, const ModelContext& ctx, const Grid& g, int buffer,
                   Json& summary, bool& any_fail) {
    Json values;
    double worst = 0.0;
    if (name == "metric") {
        worst = ctx.model().metric_residual(g, buffer);
        values["residual"] = worst;
    } else if (name == "commutator") {
        const LadderSpec& l = ctx.model().ladder();
        worst = commutator_residual(l, g, buffer);
        values["residual"] = worst;
    } else if (name == "constraint") {
        ConstraintCheck cc = constraint_residual(ctx.pair(), ctx.quasi(), g);
        values["max"] = cc.grid_max;
        values["argmax_x"] = cc.grid_argmax_x;
        values["identically_zero"] = cc.identically_zero;
        summary["constraint_max"] = cc.grid_max;
        worst = cc.grid_max;
    } else if (name == "intertwine") {
        auto [a_minus, a_plus] = supercharge_matrices(ctx.pair(), g);
        Triplet t = build_triplet(ctx.pair(), ctx.quasi());
        BandedOperator hp = t.matrix_plus(g);
        BandedOperator hm = t.matrix_minus(g);
        double rm = intertwining_residual(a_minus, hp, hm, buffer);
        double rp = intertwining_residual(a_plus, hm, hp, buffer);
        values["plus"] = rp;
        values["minus"] = rm;
        summary["intertwine_plus"] = rp;
        summary["intertwine_minus"] = rm;
        worst = std::max(rp, rm);
    } else if (name == "quasi") {
        auto [rp, rm] = quasi_hamiltonian_residual(ctx.pair(), ctx.quasi(), g, buffer);
        values["plus"] = rp;
        values["minus"] = rm;
        summary["quasi_plus"] = rp;
        summary["quasi_minus"] = rm;
        worst = std::max(rp, rm);
    } else if (name == "nilpotency") {
        worst = nilpotency_check(ctx.pair(), g);
        values["norm"] = worst;
        summary["nilpotency"] = worst;
    } else if (name == "pseudo_adjoint" || name == "pseudo_intertwine" ||
               name == "pseudo_quasi") {
        PseudoSector s = build_pseudo_sector(ctx.model(), ctx.pair(), ctx.quasi(), g);
        summary["rho_condition"] = s.rho_condition;
        if (s.rho_condition > 1e8)
            values["warning"] =
                "weight condition number exceeds 1e8; the conjugated sector is numerically "
                "untrustworthy, truncate the domain";
        if (name == "pseudo_adjoint") {
            worst = pseudo_adjoint_residual(s);
            values["residual"] = worst;
            summary["pseudo_adjoint"] = worst;
        } else if (name == "pseudo_intertwine") {
            auto [rp, rm] = pseudo_intertwining_residual(s, buffer);
            values["plus"] = rp;
            values["minus"] = rm;
            summary["pseudo_intertwine_plus"] = rp;
            summary["pseudo_intertwine_minus"] = rm;
            worst = std::max(rp, rm);
        } else {
            auto [rp, rm] = pseudo_quasi_residual(s, ctx.quasi(), buffer);
            values["plus"] = rp;
            values["minus"] = rm;
            summary["pseudo_quasi_plus"] = rp;
            summary["pseudo_quasi_minus"] = rm;
            worst = std::max(rp, rm);
        }
        values["rho_condition"] = s.rho_condition;
    } else {
        throw ConfigError("unknown check '" + name + "'");
    }

    Json entry;
    entry["check"] = name;
    entry["values"] = values;
    std::optional<double> thr = check_threshold(name);
    if (thr) {
        entry["threshold"] = *thr;
        bool ok = worst <= *thr;
        entry["status"] = ok ? "pass" : "fail";
        if (!ok) any_fail = true;
    } else {
        entry["threshold"] = nullptr;
        entry["status"] = "measured";
    }
    return entry;
}

Json spectrum_json(const SpectrumResult& s) {
    Json j;
    j["eigenvalues"] = s.eigenvalues;
    j["k"] = s.k;
    j["grid"] = grid_json(s.grid);
    j["method"] = s.method;
    if (!s.residuals.empty()) j["residuals"] = s.residuals;
    return j;
}

}  // namespace

RunResult run_spectrum(const Json& config) {
    ModelContext ctx = ModelContext::from_config(config);
    Grid g = ctx.resolve_grid(config);
    int k = 5;
    std::string op = "h_plus";
    if (config.contains("spectrum")) {
        const Json& s = config["spectrum"];
        k = static_cast<int>(number_or(s, "k", 5.0));
        if (s.contains("operator")) op = s["operator"].get<std::string>();
    }
    if (k < 0 || k > g.n) throw ConfigError("spectrum k must be in [0, n]");

    SpectrumResult res;
    if (op == "h_plus")
        res = eigen_symmetric(ctx.h_plus(g), k);
    else if (op == "h_bar")
        res = eigen_symmetric(ctx.h_bar(g), k);
    else if (op == "h_minus")
        res = eigen_symmetric(ctx.h_minus(g), k);
    else if (op == "H_tilde") {
        Field rho = ctx.model().rho_weight(g);
        std::vector<double> inv(g.n);
        for (int i = 0; i < g.n; ++i) inv[i] = 1.0 / rho[i];
        BandedOperator ht = conjugate_by_weight(ctx.h_plus(g), Field(g, std::move(inv)));
        res = eigen_via_similarity(ht, rho, k);
    } else
        throw ConfigError("unknown operator '" + op +
                          "' (expected h_plus, h_bar, h_minus, or H_tilde)");

    Json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["command"] = "spectrum";
    rep["config"] = config;
    rep["operator"] = op;
    rep["spectrum"] = spectrum_json(res);
    rep["provenance"] = provenance(g);
    return {rep, 0};
}

RunResult run_verify(const Json& config) {
    ModelContext ctx = ModelContext::from_config(config);
    Grid g = ctx.resolve_grid(config, ModelContext::GridPurpose::Checks);
    int buffer = static_cast<int>(number_or(config, "buffer", kDefaultBoundaryBuffer));
    std::vector<std::string> checks;
    if (config.contains("checks")) {
        if (!config["checks"].is_array()) throw ConfigError("'checks' must be an array");
        for (const auto& c : config["checks"]) checks.push_back(c.get<std::string>());
    } else {
        for (const auto& [n, t] : check_registry()) checks.push_back(n);
    }
    for (const auto& c : checks) check_threshold(c);  // validate names up front

    Json results = Json::array();
    Json summary;
    bool any_fail = false;
    for (const auto& c : checks)
        results.push_back(run_one_check(c, ctx, g, buffer, summary, any_fail));
    summary["grid"] = grid_json(g);
    summary["buffer"] = buffer;

    Json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["command"] = "verify";
    rep["config"] = config;
    rep["results"] = results;
    rep["summary"] = summary;
    rep["provenance"] = provenance(g);
    return {rep, any_fail ? 1 : 0};
}

RunResult run_audit(const Json& config) {
    ModelContext ctx = ModelContext::from_config(config);
    Grid g = ctx.resolve_grid(config, ModelContext::GridPurpose::Checks);
    AuditReport audit;
    if (ctx.is_isotonic())
        audit = isotonic_audit(ctx.isotonic_choice(), ctx.isotonic_omega(), g);
    else if (ctx.is_cprs())
        audit = cprs_audit(ctx.cprs_choice(), g);
    else
        throw ConfigError("audit requires a builtin model (isotonic or cprs)");

    if (config.contains("audit") && config["audit"].contains("formulas")) {
        const Json& wanted = config["audit"]["formulas"];
        if (!wanted.is_array()) throw ConfigError("audit 'formulas' must be an array of ids");
        AuditReport filtered;
        for (const auto& idj : wanted) {
            std::string id = idj.get<std::string>();
            bool found = false;
            for (const auto& f : audit.formulas)
                if (f.formula_id == id) {
                    filtered.formulas.push_back(f);
                    found = true;
                }
            if (!found) throw ConfigError("unknown audit formula id '" + id + "'");
        }
        audit = std::move(filtered);
    }

    Json results = Json::array();
    for (const auto& f : audit.formulas) {
        Json e;
        e["formula_id"] = f.formula_id;
        e["max_dev"] = f.max_dev;
        e["argmax_x"] = f.argmax_x;
        e["grid"] = grid_json(g);
        e["status"] = "measured";
        results.push_back(e);
    }
    Json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["command"] = "audit";
    rep["config"] = config;
    rep["results"] = results;
    if (ctx.is_cprs())
        rep["notes"] = Json::array(
            {"admissible coupling window enforced as 16*alpha^2 <= 1 (the wider bound sometimes "
             "quoted next to the omega_tilde formula is not self-consistent)"});
    rep["provenance"] = provenance(g);
    return {rep, 0};
}

RunResult run_convergence(const Json& config) {
    ModelContext ctx = ModelContext::from_config(config);
    Grid base = ctx.resolve_grid(config);
    std::vector<int> ns = {1000, 2000, 4000};
    int k = 5;
    if (config.contains("convergence")) {
        const Json& c = config["convergence"];
        if (c.contains("n")) {
            if (!c["n"].is_array()) throw ConfigError("convergence 'n' must be an array");
            ns.clear();
            for (const auto& v : c["n"]) ns.push_back(v.get<int>());
        }
        k = static_cast<int>(number_or(c, "k", 5.0));
    }
    if (ns.size() < 3) throw ConfigError("convergence requires at least 3 grid sizes");
    std::vector<Grid> grids;
    for (int n : ns) grids.emplace_back(base.x_min, base.x_max, n);
    ConvergenceReport cr;
    try {
        cr = convergence_study([&](const Grid& g) { return ctx.h_plus(g); }, grids, k);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    Json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["command"] = "convergence";
    rep["config"] = config;
    rep["orders"] = cr.orders;
    Json per_grid = Json::array();
    for (size_t i = 0; i < grids.size(); ++i) {
        Json e;
        e["grid"] = grid_json(grids[i]);
        e["eigenvalues"] = cr.eigenvalues[i];
        per_grid.push_back(e);
    }
    rep["eigenvalues"] = per_grid;
    rep["status"] = "measured";
    rep["provenance"] = provenance(base);
    return {rep, 0};
}

void apply_override(Json& config, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like path.to.key=value: " + assignment);
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    Json parsed;
    try {
        parsed = Json::parse(value);
    } catch (...) {
        parsed = value;  // bare strings allowed
    }
    Json* node = &config;
    std::stringstream ss(path);
    std::string key, next;
    std::getline(ss, key, '.');
    while (std::getline(ss, next, '.')) {
        node = &(*node)[key];
        key = next;
    }
    (*node)[key] = parsed;
}

std::string report_to_csv(const Json& report) {
    std::ostringstream out;
    std::string cmd = report.value("command", "");
    if (cmd == "spectrum") {
        out << "index,eigenvalue\n";
        const auto& ev = report["spectrum"]["eigenvalues"];
        for (size_t i = 0; i < ev.size(); ++i)
            out << i << "," << ev[i].dump() << "\n";
    } else if (cmd == "verify") {
        out << "check,values,threshold,status\n";
        for (const auto& r : report["results"])
            out << r["check"].get<std::string>() << ",\"" << r["values"].dump() << "\","
                << r["threshold"].dump() << "," << r["status"].get<std::string>() << "\n";
    } else if (cmd == "audit") {
        out << "formula_id,max_dev,argmax_x,status\n";
        for (const auto& r : report["results"])
            out << r["formula_id"].get<std::string>() << "," << r["max_dev"].dump() << ","
                << r["argmax_x"].dump() << "," << r["status"].get<std::string>() << "\n";
    } else if (cmd == "convergence") {
        out << "eigenvalue_index,order\n";
        const auto& orders = report["orders"];
        for (size_t i = 0; i < orders.size(); ++i) out << i << "," << orders[i].dump() << "\n";
    } else {
        out << report.dump(2) << "\n";
    }
    return out.str();
}

}  // namespace swb
