// Command-line front end: run one experiment, sweep an axis, re-verify stored
// artifacts, or stress the structural inequalities on random data.
// Exit codes: 0 verdict PASS, 1 verdict FAIL or runtime failure, 2 usage or
// configuration error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "genfun/config.hpp"
#include "genfun/harness.hpp"

namespace {

genfun::Config load_with_overrides(const std::string& path,
                                   const std::vector<std::string>& overrides) {
    genfun::Config config = genfun::load_config(path);
    for (const std::string& o : overrides) genfun::apply_override(config, o);
    genfun::validate_config(config);
    return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
    const genfun::Config config = load_with_overrides(config_path, overrides);
    const genfun::RunResult res = genfun::run_and_write(config);
    std::cout << res.summary << '\n';
    std::cout << "report: " << config.outdir << "/report.txt\n";
    return res.pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& axis, const std::string& values_csv) {
    const genfun::Config config = load_with_overrides(config_path, overrides);
    std::vector<double> values;
    for (const std::string& tok : genfun::split_char(values_csv, ','))
        values.push_back(genfun::parse_double(genfun::trim(tok), "sweep value"));
    const genfun::SweepResult sweep = genfun::run_sweep(config, axis, values);
    for (size_t i = 0; i < sweep.points.size(); ++i) {
        std::cout << axis << "=" << genfun::fmt17(sweep.points[i].value) << " "
                  << sweep.points[i].result.summary;
        if (i >= 1)
            std::cout << " diff_linf=" << genfun::fmt17(sweep.diff_linf[i - 1]);
        if (i >= 2 && std::isfinite(sweep.orders[i - 2]))
            std::cout << " order=" << genfun::fmt17(sweep.orders[i - 2]);
        std::cout << '\n';
    }
    std::cout << "table: " << config.outdir << "/sweep.csv\n";
    return sweep.all_pass ? 0 : 1;
}

int cmd_check(const std::string& dir) {
    const genfun::CheckResult res = genfun::check_artifacts(dir);
    std::cout << (res.agree ? "CHECK OK" : "CHECK MISMATCH")
              << " stored=" << (res.stored_pass ? "PASS" : "FAIL")
              << " recomputed=" << (res.recomputed_pass ? "PASS" : "FAIL") << " "
              << res.detail << '\n';
    return res.agree && res.recomputed_pass ? 0 : 1;
}

int cmd_calculus(int trials, uint64_t seed) {
    const genfun::CalculusSuiteReport rep = genfun::run_calculus_suite(trials, seed);
    std::cout << (rep.pass ? "PASS" : "FAIL") << " trials=" << rep.trials
              << " worst_sum_slack=" << genfun::fmt17(rep.worst_sum_slack)
              << " worst_product_slack=" << genfun::fmt17(rep.worst_product_slack)
              << " worst_gradient_resid=" << genfun::fmt17(rep.worst_gradient_resid)
              << " worst_time_slack=" << genfun::fmt17(rep.worst_time_slack) << '\n';
    return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-sum analyticity toolkit"};
    app.require_subcommand(1);

    std::string config_path, artifacts_dir, axis, values_csv;
    std::vector<std::string> overrides;
    int trials = 50;
    uint64_t seed = 1;

    CLI::App* run = app.add_subcommand("run", "run one configured experiment");
    run->add_option("--config", config_path, "configuration file")->required();
    run->add_option("--override", overrides, "key=value configuration override");

    CLI::App* sweep = app.add_subcommand("sweep", "run an experiment across one axis");
    sweep->add_option("--config", config_path, "configuration file")->required();
    sweep->add_option("--axis", axis, "axis to vary: N, dt, or taylor_cap")->required();
    sweep->add_option("--values", values_csv, "comma-separated axis values")->required();
    sweep->add_option("--override", overrides, "key=value configuration override");

    CLI::App* check = app.add_subcommand("check", "re-verify a stored artifact tree");
    check->add_option("--artifacts", artifacts_dir, "artifact directory")->required();

    CLI::App* calc = app.add_subcommand("calculus-test",
                                        "stress the structural inequalities on random data");
    calc->add_option("--trials", trials, "number of random pairs");
    calc->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, overrides);
        if (sweep->parsed()) return cmd_sweep(config_path, overrides, axis, values_csv);
        if (check->parsed()) return cmd_check(artifacts_dir);
        if (calc->parsed()) return cmd_calculus(trials, seed);
    } catch (const genfun::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const genfun::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
