#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sublab/runner.hpp"

namespace {

using namespace sublab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBuild = 3;

struct cli_options {
    std::string model;
    std::vector<std::string> params;
    std::vector<std::string> exprs;
    std::string config_path;
    int points = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol_h = -1.0, tol_b = -1.0;
    std::string format = "json";
    bool no_timestamp = false;
    std::string output;
};

void add_model_options(CLI::App* cmd, cli_options& o) {
    cmd->add_option("--model", o.model, "zoo model id (" + zoo_help() + ")");
    cmd->add_option("--param", o.params, "model parameter k=v (repeatable)");
    cmd->add_option("--expr", o.exprs, "model expression parameter k=expr (repeatable)");
    cmd->add_option("--config", o.config_path, "TOML run configuration");
    cmd->add_option("--points", o.points, "sample point count");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t s) { o.seed = s; o.seed_set = true; }, "sampler seed");
    cmd->add_option("--tol-h", o.tol_h, "harmonic tolerance on normalized |tau|");
    cmd->add_option("--tol-b", o.tol_b, "biharmonic tolerance on normalized |tau2|");
    cmd->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--no-timestamp", o.no_timestamp, "suppress the timestamp field");
    cmd->add_option("-o,--output", o.output, "write the report to this path");
}

run_config make_config(const cli_options& o) {
    if (!o.config_path.empty() && !o.model.empty())
        throw config_error("give either --config or --model, not both");
    run_config cfg;
    if (!o.config_path.empty()) {
        cfg = config_from_file(o.config_path);
    } else if (!o.model.empty()) {
        model_spec spec;
        spec.id = o.model;
        for (const auto& kv : o.params) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw config_error("--param expects k=v, got '" + kv + "'");
            try {
                spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw config_error("--param value in '" + kv + "' is not a number");
            }
        }
        for (const auto& kv : o.exprs) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw config_error("--expr expects k=expr, got '" + kv + "'");
            spec.expr_params[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        cfg.zoo = std::move(spec);
    } else {
        throw config_error("select a model with --model or --config");
    }
    if (o.points > 0) cfg.run.points = o.points;
    if (o.seed_set) cfg.run.seed = o.seed;
    if (o.tol_h > 0) cfg.run.tol_h = o.tol_h;
    if (o.tol_b > 0) cfg.run.tol_b = o.tol_b;
    if (o.no_timestamp) cfg.timestamp = false;
    return cfg;
}

void emit(const run_report& rep, const cli_options& o, const run_config& cfg) {
    std::string json_text = report_to_json(rep);
    std::string csv_text = report_to_csv(rep);
    if (cfg.out_json) write_atomic(*cfg.out_json, json_text);
    if (cfg.out_csv) write_atomic(*cfg.out_csv, csv_text);
    if (!o.output.empty()) write_atomic(o.output, o.format == "csv" ? csv_text : json_text);
    if (cfg.out_json || cfg.out_csv || !o.output.empty()) {
        std::printf("verdict: %s  (max|tau| %.3e, max|tau2| %.3e, %zu points)\n",
                    to_string(rep.cls.result).c_str(), rep.cls.max_tau, rep.cls.max_tau2,
                    rep.cls.records.size());
    } else {
        std::fputs((o.format == "csv" ? csv_text : json_text).c_str(), stdout);
    }
}

int cmd_check(const cli_options& o) {
    run_config cfg = make_config(o);
    run_report rep = run_check(cfg);
    emit(rep, o, cfg);
    return kExitOk;
}

int cmd_field(const cli_options& o, bool second_order) {
    run_config cfg = make_config(o);
    built_model bm = build_from_config(cfg);
    auto pts = sample_points(bm.domain_chart(), cfg.run.points, cfg.run.seed, bm.constants);
    std::optional<einstein_data> ed = cfg.run.einstein;
    auto records = evaluate_points(bm, pts, ed);
    std::ostringstream out;
    if (o.format == "csv") {
        out << "index";
        for (std::size_t c = 0; c < pts[0].size(); ++c) out << ",x" << c;
        out << (second_order ? ",norm_tau2\n" : ",norm_tau\n");
        for (std::size_t i = 0; i < records.size(); ++i) {
            out << i;
            char buf[40];
            for (double c : records[i].coords) {
                std::snprintf(buf, sizeof buf, ",%.17g", c);
                out << buf;
            }
            std::snprintf(buf, sizeof buf, ",%.17g", second_order ? records[i].tau2 : records[i].tau);
            out << buf << "\n";
        }
    } else {
        out << "[\n";
        for (std::size_t i = 0; i < records.size(); ++i) {
            out << "  {\"index\": " << i << ", \"point\": [";
            for (std::size_t c = 0; c < records[i].coords.size(); ++c) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", records[i].coords[c]);
                out << (c ? ", " : "") << buf;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", second_order ? records[i].tau2 : records[i].tau);
            out << "], \"" << (second_order ? "tau2" : "tau") << "\": " << buf << "}"
                << (i + 1 < records.size() ? "," : "") << "\n";
        }
        out << "]\n";
    }
    if (!o.output.empty()) write_atomic(o.output, out.str());
    else std::fputs(out.str().c_str(), stdout);
    return kExitOk;
}

int cmd_validate(const cli_options& o) {
    std::uint64_t seed = o.seed_set ? o.seed : 20250801;
    auto suites = self_validate(seed);
    for (const auto& s : suites)
        std::printf("%-32s %s  worst %.3e  %s\n", s.name.c_str(), s.pass ? "PASS" : "FAIL",
                    s.worst, s.detail.c_str());
    bool ok = all_pass(suites);
    std::printf("self-validate: %s (%zu suites)\n", ok ? "all suites pass" : "FAILURES", suites.size());
    return ok ? kExitOk : 1;
}

int cmd_report(const std::string& in_path, const cli_options& o) {
    std::ifstream in(in_path);
    if (!in) throw config_error("cannot open report '" + in_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    run_report rep = report_from_json(ss.str());
    verdict recomputed = verdict_from_records(rep.cls);
    if (recomputed != rep.cls.result)
        throw config_error("stored verdict '" + to_string(rep.cls.result) +
                           "' does not match the records (recomputed '" + to_string(recomputed) +
                           "')");
    std::string text = o.format == "csv" ? report_to_csv(rep) : report_to_json(rep);
    if (!o.output.empty()) write_atomic(o.output, text);
    else std::fputs(text.c_str(), stdout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sublab: numerical harmonic/biharmonic verification for maps and Riemannian "
                 "submersions"};
    app.require_subcommand(1);

    cli_options check_o, tension_o, bitension_o, validate_o, report_o;
    std::string report_in;

    CLI::App* check = app.add_subcommand("check", "classify a model and emit a report");
    add_model_options(check, check_o);
    CLI::App* tension = app.add_subcommand("tension", "tension field norms at sampled points");
    add_model_options(tension, tension_o);
    CLI::App* bitension =
        app.add_subcommand("bitension", "bitension field norms at sampled points");
    add_model_options(bitension, bitension_o);
    CLI::App* validate = app.add_subcommand("validate", "run the invariant suites on the zoo");
    validate->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { validate_o.seed = s; validate_o.seed_set = true; },
        "suite seed");
    CLI::App* report = app.add_subcommand("report", "reload a JSON report and re-emit it");
    report->add_option("--in", report_in, "existing JSON report")->required();
    report->add_option("--format", report_o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    report->add_option("-o,--output", report_o.output, "output path");

    try {
        app.parse(argc, argv);
        if (check->parsed()) return cmd_check(check_o);
        if (tension->parsed()) return cmd_field(tension_o, false);
        if (bitension->parsed()) return cmd_field(bitension_o, true);
        if (validate->parsed()) return cmd_validate(validate_o);
        if (report->parsed()) return cmd_report(report_in, report_o);
        return kExitConfig;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const parse_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const build_error& e) {
        std::fprintf(stderr, "model build error: %s\n", e.what());
        return kExitBuild;
    } catch (const sampling_error& e) {
        std::fprintf(stderr, "sampling error: %s\n", e.what());
        return kExitBuild;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
