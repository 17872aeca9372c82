#pragma once

// Config-driven run engine behind the CLI: model resolution, the fixed
// check registry, machine-readable reports with a stable schema, and the
// exit-code contract (0 success/measured-only, 1 threshold failure,
// 2 config error).

#include <json.hpp>

#include "swb/models.hpp"
#include "swb/pseudo.hpp"
#include "swb/spectral.hpp"

namespace swb {

using Json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr const char* kSchemaVersion = "1";
constexpr const char* kToolVersion = "0.1.0";

// Resolved model: the operators and verification objects a command needs.
class ModelContext {
public:
    static ModelContext from_config(const Json& config);

    // builtin models embed per-purpose default grids: the cprs kappa = 0
    // spectrum lives on a symmetric domain, while its factorization pair has
    // poles at the origin and is checked on a standoff domain
    enum class GridPurpose { Spectrum, Checks };
    const Grid& default_grid() const { return default_grid_; }
    Grid resolve_grid(const Json& config, GridPurpose purpose = GridPurpose::Spectrum) const;

    const SwansonModel& model() const;
    const FactorPair& pair() const;
    const QuasiSpec& quasi() const;
    bool has_pair() const { return pair_.has_value(); }

    // seed operator: Route-A potential for the cprs builtin, the equivalent
    // Hermitian operator otherwise (triplet route when a factor pair is given)
    BandedOperator h_plus(const Grid& g) const;
    BandedOperator h_bar(const Grid& g) const;
    BandedOperator h_minus(const Grid& g) const;

    std::string name() const { return name_; }
    bool is_isotonic() const { return isotonic_.has_value(); }
    bool is_cprs() const { return cprs_.has_value(); }
    const CPRSChoice& cprs_choice() const { return *cprs_; }
    const IsotonicChoice& isotonic_choice() const { return *isotonic_; }
    double isotonic_omega() const { return isotonic_omega_; }

private:
    std::string name_;
    std::optional<SwansonModel> model_;
    std::optional<FactorPair> pair_;
    std::optional<QuasiSpec> quasi_;
    std::optional<CPRSChoice> cprs_;
    std::optional<IsotonicChoice> isotonic_;
    double isotonic_omega_ = 1.0;
    std::optional<Expr> h_plus_mass_, h_plus_potential_;
    Grid default_grid_{-10.0, 10.0, 2000};
    std::optional<Grid> default_check_grid_;
    bool has_default_grid_ = false;  // only builtin models embed a grid
};

struct RunResult {
    Json report;
    int exit_code = 0;  // 0 ok, 1 thresholded check failed
};

RunResult run_spectrum(const Json& config);
RunResult run_verify(const Json& config);
RunResult run_audit(const Json& config);
RunResult run_convergence(const Json& config);

// "a.b.c=value" override applied to a config document.
void apply_override(Json& config, const std::string& assignment);

std::string report_to_csv(const Json& report);

// Registry of verify checks with their pass thresholds; checks without a
// threshold are reported as "measured" and never fail a run.
const std::vector<std::pair<std::string, std::optional<double>>>& check_registry();

}  // namespace swb
