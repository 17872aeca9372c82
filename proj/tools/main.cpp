#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "swb/report.hpp"

namespace {

swb::Json load_config(const std::string& path, const std::string& model_name,
                      const std::vector<std::string>& overrides) {
    swb::Json config = swb::Json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw swb::ConfigError("cannot open config file: " + path);
        try {
            config = swb::Json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw swb::ConfigError("config parse error in " + path + ": " + e.what());
        }
    }
    if (!model_name.empty()) config["model"]["name"] = model_name;
    for (const auto& ov : overrides) swb::apply_override(config, ov);
    if (!config.contains("model"))
        throw swb::ConfigError("no model given; use --config or --model");
    return config;
}

void emit(const swb::RunResult& result, const std::string& format, const std::string& path) {
    std::string text = format == "csv" ? swb::report_to_csv(result.report)
                                       : result.report.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(path);
        if (!out) throw swb::ConfigError("cannot open output file: " + path);
        out << text;
    }
}

struct CommonArgs {
    std::string config_path;
    std::string model;
    std::vector<std::string> sets;
    std::string output;
    std::string format = "json";
    std::string dump_matrix;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (JSON)");
    cmd->add_option("--model", args.model, "builtin model name (cprs, isotonic) or custom");
    cmd->add_option("--set", args.sets, "override config entries, e.g. --set model.kappa=0.5");
    cmd->add_option("--output", args.output, "output path ('-' for stdout)");
    cmd->add_option("--format", args.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator workbench for generalized Swanson models"};
    app.require_subcommand(1);

    CommonArgs spectrum_args, verify_args, audit_args, conv_args;
    CLI::App* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of a model operator");
    add_common(spectrum, spectrum_args);
    spectrum->add_option("--dump-matrix", spectrum_args.dump_matrix,
                         "write the operator bands to a text file");
    CLI::App* verify = app.add_subcommand("verify", "run operator-identity checks");
    add_common(verify, verify_args);
    CLI::App* audit = app.add_subcommand("audit", "measure closed-form deviations");
    add_common(audit, audit_args);
    CLI::App* convergence = app.add_subcommand("convergence", "eigenvalue order-of-convergence");
    add_common(convergence, conv_args);

    CLI11_PARSE(app, argc, argv);

    try {
        swb::RunResult result;
        if (spectrum->parsed()) {
            swb::Json config = load_config(spectrum_args.config_path, spectrum_args.model,
                                           spectrum_args.sets);
            if (!spectrum_args.dump_matrix.empty()) {
                swb::ModelContext ctx = swb::ModelContext::from_config(config);
                swb::Grid g = ctx.resolve_grid(config);
                std::ofstream out(spectrum_args.dump_matrix);
                if (!out)
                    throw swb::ConfigError("cannot open dump file: " + spectrum_args.dump_matrix);
                ctx.h_plus(g).dump(out);
            }
            result = swb::run_spectrum(config);
            emit(result, spectrum_args.format, spectrum_args.output);
        } else if (verify->parsed()) {
            swb::Json config =
                load_config(verify_args.config_path, verify_args.model, verify_args.sets);
            result = swb::run_verify(config);
            emit(result, verify_args.format, verify_args.output);
        } else if (audit->parsed()) {
            swb::Json config =
                load_config(audit_args.config_path, audit_args.model, audit_args.sets);
            result = swb::run_audit(config);
            emit(result, audit_args.format, audit_args.output);
        } else if (convergence->parsed()) {
            swb::Json config = load_config(conv_args.config_path, conv_args.model, conv_args.sets);
            result = swb::run_convergence(config);
            emit(result, conv_args.format, conv_args.output);
        }
        return result.exit_code;
    } catch (const swb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
