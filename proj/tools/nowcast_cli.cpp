#include "nowcast/nowcast.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string scenario;
    std::string population;
    std::optional<std::string> synth;
    std::string data_dir;
    std::string policy_dir;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool print_config = false;
};

int report(nc_status status) {
    if (status == NC_OK) {
        return 0;
    }
    std::fprintf(stderr, "error: %s", nc_last_error());
    const std::string message = nc_last_error();
    if (message.empty() || message.back() != '\n') {
        std::fputc('\n', stderr);
    }
    switch (status) {
    case NC_VALIDATION:
    case NC_DOMAIN:
    case NC_ARGUMENT:
        return 1;
    case NC_INFEASIBLE:
        return 2;
    case NC_IO:
        return 3;
    default:
        return 4;
    }
}

nc_run_config config_of(const Options &o) {
    nc_run_config c{};
    c.scenario = o.scenario.empty() ? nullptr : o.scenario.c_str();
    c.population_dir = o.population.empty() ? nullptr : o.population.c_str();
    c.synth_config = o.synth ? o.synth->c_str() : nullptr;
    c.data_dir = o.data_dir.empty() ? nullptr : o.data_dir.c_str();
    c.policy_dir = o.policy_dir.empty() ? nullptr : o.policy_dir.c_str();
    c.out_dir = o.out.empty() ? nullptr : o.out.c_str();
    c.has_seed = o.seed ? 1 : 0;
    c.seed = o.seed.value_or(0);
    c.threads = o.threads;
    return c;
}

int print_config(const Options &o) {
    const auto c = config_of(o);
    char *text = nullptr;
    const nc_status status = nc_print_config(&c, &text);
    if (status == NC_OK) {
        std::fputs(text, stdout);
    }
    nc_string_free(text);
    return report(status);
}

void add_inputs(CLI::App *cmd, Options &o) {
    cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
    auto *population = cmd->add_option("--population", o.population, "Directory with households.csv and persons.csv");
    auto *synth = cmd->add_option("--synth", o.synth, "Synthetic population config (\"\" for defaults)");
    population->excludes(synth);
    synth->excludes(population);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Nowcast household incomes under a labour-market shock and its policy response"};
    app.set_version_flag("--version", std::string(nc_version()));
    app.require_subcommand(0, 1);

    Options o;
    app.add_option("--data-dir", o.data_dir, "Model data directory")->default_str(nc_default_data_dir());
    app.add_option("--policy-dir", o.policy_dir, "Policy schedule directory (default: <data-dir>/policy)");
    app.add_option("--seed", o.seed, "Override the scenario seed");
    app.add_option("--threads", o.threads, "Worker threads, 0 for all cores")->default_val(1);
    app.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");

    auto *run = app.add_subcommand("run", "Run a scenario and write the output tables");
    add_inputs(run, o);
    run->add_option("--out", o.out, "Output directory")->required();

    auto *validate = app.add_subcommand("validate", "Check every input without simulating");
    add_inputs(validate, o);

    std::string instrument;
    double earnings = 0.0;
    std::string date;
    auto *schedules = app.add_subcommand("schedules", "Print the weekly amount an instrument pays");
    schedules->add_option("instrument", instrument, "pup, ceib, twss or ewss")->required();
    schedules->add_option("--earnings", earnings, "Weekly earnings (take-home pay for twss)")->required();
    schedules->add_option("--date", date, "Date, YYYY-MM-DD")->required();

    std::string synth_out;
    std::string synth_config;
    auto *synth = app.add_subcommand("synth", "Write a synthetic population");
    synth->add_option("--config", synth_config, "Generator config (defaults when omitted)");
    synth->add_option("--out", synth_out, "Output directory")->required();

    std::string ipf_seed;
    std::string ipf_rows;
    std::string ipf_cols;
    std::string ipf_out;
    double ipf_tol = 1e-8;
    int ipf_max = 1000;
    auto *ipf = app.add_subcommand("ipf", "Fit a seed matrix to row and column targets");
    ipf->add_option("--matrix", ipf_seed, "Seed matrix CSV")->required();
    ipf->add_option("--rows", ipf_rows, "Row targets CSV (label,target)")->required();
    ipf->add_option("--cols", ipf_cols, "Column targets CSV (label,target)")->required();
    ipf->add_option("--tol", ipf_tol, "Convergence tolerance")->default_val(1e-8);
    ipf->add_option("--max-iter", ipf_max, "Iteration limit")->default_val(1000);
    ipf->add_option("--out", ipf_out, "Write the fitted matrix here instead of stdout");

    // Global flags are accepted after the subcommand too.
    for (auto *cmd : {run, validate, schedules, synth, ipf}) {
        cmd->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (o.print_config) {
        return print_config(o);
    }

    if (*run) {
        const auto c = config_of(o);
        return report(nc_run(&c));
    }
    if (*validate) {
        const auto c = config_of(o);
        char *text = nullptr;
        const nc_status status = nc_validate(&c, &text);
        if (status == NC_OK) {
            std::fputs(text, stdout);
        }
        nc_string_free(text);
        return report(status);
    }
    if (*schedules) {
        std::int64_t cents = 0;
        const nc_status status = nc_schedule_rate(o.policy_dir.empty() ? nullptr : o.policy_dir.c_str(),
                                                  instrument.c_str(), earnings, date.c_str(), &cents);
        if (status == NC_OK) {
            const std::int64_t magnitude = cents < 0 ? -cents : cents;
            std::printf("%s%" PRId64 ".%02" PRId64 "\n", cents < 0 ? "-" : "", magnitude / 100, magnitude % 100);
        }
        return report(status);
    }
    if (*synth) {
        nc_population *population = nullptr;
        const std::uint64_t seed = o.seed.value_or(20200505);
        nc_status status = nc_population_generate(synth_config.c_str(), seed, &population);
        if (status == NC_OK) {
            status = nc_population_save(population, synth_out.c_str());
        }
        nc_population_free(population);
        return report(status);
    }
    if (*ipf) {
        char *csv = nullptr;
        int iterations = 0;
        const nc_status status =
            nc_ipf_files(ipf_seed.c_str(), ipf_rows.c_str(), ipf_cols.c_str(), ipf_tol, ipf_max, &csv, &iterations);
        if (status == NC_OK) {
            if (ipf_out.empty()) {
                std::fputs(csv, stdout);
            } else {
                std::ofstream out(ipf_out, std::ios::binary);
                out << csv;
                if (!out) {
                    nc_string_free(csv);
                    std::fprintf(stderr, "error: cannot write %s\n", ipf_out.c_str());
                    return 3;
                }
            }
            std::fprintf(stderr, "converged after %d iterations\n", iterations);
        }
        nc_string_free(csv);
        return report(status);
    }
    std::cout << app.help();
    return 1;
}
