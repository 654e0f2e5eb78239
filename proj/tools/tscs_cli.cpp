// tscs: simulate, calibrate, shield, analyze, attack and report.
// Exit status: 0 success, 1 validation error, 2 runtime failure.

#include <tscs/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal side-channel shielding simulator"};
    app.set_version_flag("--version", std::string(tscs::kToolVersion));
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    auto scenario_opts = [&](CLI::App* c) {
        c->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        c->add_option("--out", out_dir, "output directory");
        c->add_option("--seed", seed, "overrides the scenario seed");
    };

    auto* simulate = app.add_subcommand("simulate", "unshielded thermal run: cell and block temperature traces");
    scenario_opts(simulate);

    auto* calibrate = app.add_subcommand("calibrate", "P tables, increment sweep and T table");
    scenario_opts(calibrate);

    tscs::ShieldOptions shield_opt;
    auto* shield = app.add_subcommand("shield", "closed-loop shielded runs and the metrics summary");
    scenario_opts(shield);
    shield->add_option("--security-level", shield_opt.security_level, "level in the scenario T table");
    shield->add_flag("--sweep", shield_opt.sweep, "run every increment in sweep_delta_t_c plus shield_global");
    shield->add_flag("--max-avg", shield_opt.max_avg, "include the max_avg baseline");

    tscs::AnalyzeOptions an_opt;
    std::string inst_csv, temp_csv, an_out;
    auto* analyze = app.add_subcommand("analyze", "best delay, SVF and STSF for a trace pair");
    analyze->add_option("--inst", inst_csv, "execution trace CSV")->required()->check(CLI::ExistingFile);
    analyze->add_option("--temp", temp_csv, "observed temperature trace CSV")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", an_out, "also write analysis files here");
    analyze->add_option("--format", an_opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--k-max", an_opt.k_max, "largest delay tried (samples)");
    analyze->add_option("--window", an_opt.svf.window, "SVF window (samples)");
    analyze->add_option("--stride", an_opt.svf.stride, "SVF window stride (samples)");
    analyze->add_option("--skip", an_opt.svf.skip, "leading samples ignored");
    analyze->add_option("--epsilon", an_opt.epsilon, "STSF grouping threshold (degC)");
    analyze->add_option("--m", an_opt.m_values, "STSF group counts");

    std::string sensor_list;
    auto* attack = app.add_subcommand("attack", "per-sensor attacker views and layer attenuation");
    scenario_opts(attack);
    attack->add_option("--sensors", sensor_list, "comma-separated sensor ids (default: all)");

    std::vector<std::string> runs;
    auto* report = app.add_subcommand("report", "SVG figures and aggregate CSV from shield runs");
    report->add_option("runs", runs, "run directories holding summary.csv")->required();
    report->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        auto load = [&] { return tscs::load_scenario(scenario_path, seed); };
        if (simulate->parsed()) tscs::cmd_simulate(load(), out_dir);
        else if (calibrate->parsed()) tscs::cmd_calibrate(load(), out_dir);
        else if (shield->parsed()) tscs::cmd_shield(load(), out_dir, shield_opt);
        else if (attack->parsed()) tscs::cmd_attack(load(), out_dir, split_ids(sensor_list));
        else if (report->parsed()) {
            std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
            tscs::cmd_report(dirs, out_dir);
        } else if (analyze->parsed()) {
            std::optional<std::filesystem::path> out;
            if (!an_out.empty()) out = an_out;
            std::cout << tscs::cmd_analyze(inst_csv, temp_csv, an_opt, out);
        }
    } catch (const tscs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
