#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "swb/report.hpp"

using namespace swb;

namespace {

Json chain_config() {
    Json c;
    c["model"] = {{"name", "custom"}, {"omega", 1.0}, {"alpha", 0.0}, {"beta", 0.0},
                  {"a", "1"},         {"b", "x"},     {"b1", "x"},    {"b2", "x"},
                  {"quasi", {{"kind", "split_c"}, {"c", -2.0}}}};
    c["grid"] = {{"x_min", -8.0}, {"x_max", 8.0}, {"n", 2000}};
    return c;
}

Json strip_timestamps(Json j) {
    if (j.contains("provenance")) j["provenance"].erase("timestamp");
    return j;
}

}  // namespace

TEST_CASE("config validation errors") {
    Json empty;
    CHECK_THROWS_AS(ModelContext::from_config(empty), ConfigError);

    Json noname;
    noname["model"] = {{"omega", 1.0}};
    CHECK_THROWS_AS(ModelContext::from_config(noname), ConfigError);

    Json badgrid = chain_config();
    badgrid["grid"] = {{"x_min", 0.0}, {"x_max", 1.0}};
    CHECK_THROWS_AS(ModelContext::from_config(badgrid).resolve_grid(badgrid), ConfigError);

    Json badexpr = chain_config();
    badexpr["model"]["b"] = "2*(x";
    CHECK_THROWS_AS(ModelContext::from_config(badexpr), ConfigError);

    Json badquasi = chain_config();
    badquasi["model"]["quasi"] = {{"kind", "cubic"}};
    CHECK_THROWS_AS(ModelContext::from_config(badquasi), ConfigError);

    Json badcheck = chain_config();
    badcheck["checks"] = {"metric", "nosuchcheck"};
    CHECK_THROWS_AS(run_verify(badcheck), ConfigError);
}

TEST_CASE("builtin models come with default grids") {
    Json c;
    c["model"] = {{"name", "cprs"}};
    ModelContext ctx = ModelContext::from_config(c);
    Grid g = ctx.resolve_grid(c);
    CHECK(g.n == 4000);
    CHECK(g.x_min == -10.0);

    Json iso;
    iso["model"] = {{"name", "isotonic"}, {"omega_tilde", 1.0}};
    Grid gi = ModelContext::from_config(iso).resolve_grid(iso);
    CHECK(gi.x_min > 0.0);
    CHECK(gi.x_min == doctest::Approx(10.0 * gi.h).epsilon(1e-12));
}

TEST_CASE("verify on the harmonic chain passes every thresholded check") {
    RunResult r = run_verify(chain_config());
    CHECK(r.exit_code == 0);
    for (const auto& entry : r.report["results"]) {
        std::string status = entry["status"];
        if (entry["threshold"].is_null())
            CHECK(status == "measured");
        else
            CHECK(status == "pass");
    }
    // summary block carries the residual fields and grid/buffer echo
    const Json& s = r.report["summary"];
    for (const char* key : {"constraint_max", "intertwine_plus", "intertwine_minus",
                            "quasi_plus", "quasi_minus", "nilpotency", "grid", "buffer"})
        CHECK(s.contains(key));
}

TEST_CASE("negative control fails the run with exit code 1") {
    Json c = chain_config();
    c["model"]["b2"] = "x + 0.1";
    c["checks"] = {"intertwine", "quasi"};
    RunResult r = run_verify(c);
    CHECK(r.exit_code == 1);
    bool any_fail = false;
    for (const auto& entry : r.report["results"])
        if (entry["status"] == "fail") any_fail = true;
    CHECK(any_fail);
}

TEST_CASE("transcribed rational pair is measured, not failed") {
    Json c;
    c["model"] = {{"name", "cprs"}, {"kappa", 0.0}, {"alpha", 0.0}};
    c["grid"] = {{"x_min", 0.5}, {"x_max", 8.0}, {"n", 1000}};
    c["checks"] = {"constraint"};
    RunResult r = run_verify(c);
    CHECK(r.exit_code == 0);
    const Json& entry = r.report["results"][0];
    CHECK(entry["status"] == "measured");
    CHECK(entry["values"]["max"].get<double>() > 1.0);
    CHECK_FALSE(entry["values"]["identically_zero"].get<bool>());
}

TEST_CASE("reports are deterministic up to the timestamp") {
    Json c = chain_config();
    c["checks"] = {"metric", "constraint", "intertwine", "nilpotency"};
    Json a = strip_timestamps(run_verify(c).report);
    Json b = strip_timestamps(run_verify(c).report);
    CHECK(a.dump() == b.dump());
}

TEST_CASE("spectrum command on the cprs builtin") {
    Json c;
    c["model"] = {{"name", "cprs"}};
    RunResult r = run_spectrum(c);
    CHECK(r.exit_code == 0);
    std::vector<double> ev = r.report["spectrum"]["eigenvalues"].get<std::vector<double>>();
    REQUIRE(ev.size() == 5);
    std::vector<double> expect = {-3.0, 3.0, 5.0, 7.0, 9.0};
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(ev[i] - expect[i]) < 1e-3);
}

TEST_CASE("spectrum of the custom oscillator ladder follows the even-spacing law") {
    Json c;
    c["model"] = {{"name", "custom"}, {"omega", 1.0}, {"alpha", 0.1}, {"beta", -0.1},
                  {"a", "0.70710678118654752"}, {"b", "0.70710678118654752*x"}};
    c["grid"] = {{"x_min", -10.0}, {"x_max", 10.0}, {"n", 4000}};
    RunResult r = run_spectrum(c);
    std::vector<double> ev = r.report["spectrum"]["eigenvalues"].get<std::vector<double>>();
    double spacing = std::sqrt(1.0 - 4.0 * 0.1 * (-0.1));
    for (int i = 0; i < 5; ++i)
        CHECK(std::fabs(ev[i] - spacing * (i + 0.5)) < 1e-4);
}

TEST_CASE("missing grid block on a custom model is a validation error") {
    Json c;
    c["model"] = {{"name", "custom"}, {"omega", 1.0}, {"alpha", 0.0}, {"beta", 0.0},
                  {"a", "1"}, {"b", "x"}};
    CHECK_THROWS_AS(run_spectrum(c), ConfigError);  // no grid at all
    c["grid"] = {{"x_min", 0.0}};                   // incomplete grid
    CHECK_THROWS_AS(run_spectrum(c), ConfigError);
}

TEST_CASE("audit command runs the builtin audits and never fails") {
    Json iso;
    iso["model"] = {{"name", "isotonic"}, {"alpha", 0.0}, {"beta", 0.0},
                    {"omega_tilde", 1.0}, {"c", 0.0},     {"d", 1.0}};
    iso["grid"] = {{"x_min", 0.3}, {"x_max", 6.0}, {"n", 800}};
    RunResult r = run_audit(iso);
    CHECK(r.exit_code == 0);
    for (const auto& e : r.report["results"]) CHECK(e["status"] == "measured");

    Json cprs;
    cprs["model"] = {{"name", "cprs"}};
    cprs["grid"] = {{"x_min", 0.5}, {"x_max", 8.0}, {"n", 800}};
    RunResult rc = run_audit(cprs);
    CHECK(rc.exit_code == 0);
    bool b1_gap = false;
    for (const auto& e : rc.report["results"]) {
        if (e["formula_id"] == "b1_transcribed_vs_exact")
            b1_gap = e["max_dev"].get<double>() > 0.1;
        if (e["formula_id"] == "V_pm_closed_vs_route_a")
            CHECK(e["max_dev"].get<double>() <= 1e-12);
    }
    CHECK(b1_gap);

    Json custom = chain_config();
    CHECK_THROWS_AS(run_audit(custom), ConfigError);

    // formula selection with validation
    Json pick = cprs;
    pick["audit"] = {{"formulas", {"b1_transcribed_vs_exact"}}};
    RunResult rp = run_audit(pick);
    CHECK(rp.report["results"].size() == 1);
    pick["audit"] = {{"formulas", {"nosuchformula"}}};
    CHECK_THROWS_AS(run_audit(pick), ConfigError);
}

TEST_CASE("convergence command reports second order for the cprs builtin") {
    Json c;
    c["model"] = {{"name", "cprs"}};
    c["convergence"] = {{"n", {1000, 2000, 4000}}, {"k", 3}};
    RunResult r = run_convergence(c);
    CHECK(r.exit_code == 0);
    for (double p : r.report["orders"].get<std::vector<double>>()) {
        CHECK(p > 1.7);
        CHECK(p < 2.3);
    }
    Json two = c;
    two["convergence"]["n"] = {1000, 2000};
    CHECK_THROWS_AS(run_convergence(two), ConfigError);
}

TEST_CASE("config overrides") {
    Json c = chain_config();
    apply_override(c, "model.b2=x + 0.1");
    CHECK(c["model"]["b2"] == "x + 0.1");
    apply_override(c, "grid.n=500");
    CHECK(c["grid"]["n"] == 500);
    CHECK_THROWS_AS(apply_override(c, "nonsense"), ConfigError);
}

TEST_CASE("csv rendering") {
    Json c;
    c["model"] = {{"name", "cprs"}};
    c["grid"] = {{"x_min", -10.0}, {"x_max", 10.0}, {"n", 1000}};
    RunResult r = run_spectrum(c);
    std::string csv = report_to_csv(r.report);
    CHECK(csv.rfind("index,eigenvalue\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows
}
