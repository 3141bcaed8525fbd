#include "nowcast/nowcast.h"

#include "core/calibration.hpp"
#include "core/error.hpp"
#include "core/population.hpp"
#include "core/synth.hpp"
#include "core/taxben.hpp"
#include "core/version.hpp"
#include "core/workflow.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct nc_population {
    nowcast::Population population;
};

namespace {

thread_local std::string g_last_error;

nc_status fail(nc_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

nc_status succeed() {
    g_last_error.clear();
    return NC_OK;
}

std::string issues_text(const nowcast::ValidationError &e) {
    std::string text;
    for (const auto &issue : e.issues()) {
        text += issue.str() + "\n";
    }
    return text;
}

template <class Body>
nc_status guarded(Body &&body) {
    try {
        body();
        return succeed();
    } catch (const nowcast::ValidationError &e) {
        return fail(NC_VALIDATION, issues_text(e));
    } catch (const nowcast::InfeasibleError &e) {
        return fail(NC_INFEASIBLE, e.what());
    } catch (const nowcast::IoError &e) {
        return fail(NC_IO, e.what());
    } catch (const nowcast::DomainError &e) {
        return fail(NC_DOMAIN, e.what());
    } catch (const std::bad_alloc &) {
        return fail(NC_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(NC_INTERNAL, e.what());
    } catch (...) {
        return fail(NC_INTERNAL, "unknown error");
    }
}

char *copy_string(const std::string &text) {
    char *out = static_cast<char *>(std::malloc(text.size() + 1));
    if (!out) {
        throw std::bad_alloc();
    }
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

nowcast::RunRequest request_of(const nc_run_config &config) {
    nowcast::RunRequest request;
    if (config.scenario) {
        request.scenario = config.scenario;
    }
    if (config.population_dir) {
        request.population_dir = config.population_dir;
    }
    if (config.synth_config) {
        request.synth_config = config.synth_config;
    }
    request.data_dir = config.data_dir ? config.data_dir : nowcast::default_data_dir();
    if (config.policy_dir) {
        request.policy_dir = config.policy_dir;
    }
    if (config.has_seed) {
        request.seed = config.seed;
    }
    request.threads = config.threads;
    return request;
}

} // namespace

extern "C" {

const char *nc_last_error(void) { return g_last_error.c_str(); }

const char *nc_version(void) { return nowcast::kVersion.data(); }

const char *nc_default_data_dir(void) {
    static const std::string dir = nowcast::default_data_dir().string();
    return dir.c_str();
}

void nc_string_free(char *text) { std::free(text); }

nc_status nc_population_load(const char *dir, nc_population **out) {
    if (!dir || !out) {
        return fail(NC_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = new nc_population{nowcast::load_population(dir)}; });
}

nc_status nc_population_generate(const char *config_path, uint64_t seed, nc_population **out) {
    if (!out) {
        return fail(NC_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] {
        const auto config = config_path && *config_path ? nowcast::load_synth_config(config_path)
                                                         : nowcast::SynthConfig::defaults();
        *out = new nc_population{nowcast::generate_synthetic(config, seed)};
    });
}

nc_status nc_population_save(const nc_population *population, const char *dir) {
    if (!population || !dir) {
        return fail(NC_ARGUMENT, "null argument");
    }
    return guarded([&] { nowcast::save_population(population->population, dir); });
}

nc_status nc_population_counts(const nc_population *population, size_t *households, size_t *persons) {
    if (!population) {
        return fail(NC_ARGUMENT, "null argument");
    }
    if (households) {
        *households = population->population.households().size();
    }
    if (persons) {
        *persons = population->population.persons().size();
    }
    return succeed();
}

void nc_population_free(nc_population *population) { delete population; }

nc_status nc_schedule_rate(const char *policy_dir, const char *instrument, double weekly_earnings, const char *date,
                           int64_t *cents) {
    if (!instrument || !date || !cents) {
        return fail(NC_ARGUMENT, "null argument");
    }
    return guarded([&] {
        const auto day = nowcast::parse_date(date);
        if (!day) {
            throw nowcast::ValidationError(std::string("invalid date '") + date + "'");
        }
        if (!(weekly_earnings >= 0.0)) {
            throw nowcast::DomainError("earnings must be non-negative");
        }
        const auto schedules = nowcast::PolicySchedules::load(
            policy_dir ? std::filesystem::path(policy_dir) : nowcast::default_data_dir() / "policy");
        const auto earnings = nowcast::Money::from_euros(weekly_earnings);
        const std::string name(instrument);
        nowcast::Money rate;
        if (name == "pup") {
            rate = schedules.pup_rate(earnings, *day);
        } else if (name == "ceib") {
            rate = earnings.cents() > 0 ? schedules.ceib_rate(*day, earnings) : schedules.ceib_rate(*day);
        } else if (name == "twss") {
            rate = schedules.twss_subsidy(earnings, *day);
        } else if (name == "ewss") {
            rate = schedules.ewss_subsidy(earnings, *day);
        } else {
            throw nowcast::ValidationError("unknown instrument '" + name + "' (expected pup, ceib, twss or ewss)");
        }
        *cents = rate.cents();
    });
}

nc_status nc_validate(const nc_run_config *config, char **report) {
    if (!config) {
        return fail(NC_ARGUMENT, "null argument");
    }
    if (report) {
        *report = nullptr;
    }
    const nc_status status = guarded([&] { nowcast::prepare_run(request_of(*config)); });
    if (report) {
        try {
            *report = copy_string(status == NC_OK ? std::string("ok\n") : g_last_error);
        } catch (const std::bad_alloc &) {
            return fail(NC_INTERNAL, "out of memory");
        }
    }
    return status;
}

nc_status nc_run(const nc_run_config *config) {
    if (!config || !config->out_dir) {
        return fail(NC_ARGUMENT, "null argument");
    }
    return guarded([&] {
        const auto run = nowcast::prepare_run(request_of(*config));
        const auto files = nowcast::execute_run(run);
        nowcast::write_outputs(config->out_dir, files);
    });
}

nc_status nc_print_config(const nc_run_config *config, char **text) {
    if (!config || !text) {
        return fail(NC_ARGUMENT, "null argument");
    }
    *text = nullptr;
    return guarded([&] { *text = copy_string(nowcast::describe_config(request_of(*config))); });
}

nc_status nc_ipf_files(const char *seed_path, const char *row_targets_path, const char *col_targets_path,
                       double tolerance, int max_iterations, char **csv, int *iterations) {
    if (!seed_path || !row_targets_path || !col_targets_path || !csv) {
        return fail(NC_ARGUMENT, "null argument");
    }
    *csv = nullptr;
    return guarded([&] {
        const auto seed = nowcast::load_seed_matrix(seed_path);
        const auto order = [](const nowcast::LabeledTargets &targets, const std::vector<std::string> &labels,
                              const char *path) {
            std::vector<double> out;
            for (const auto &label : labels) {
                const auto it = std::find(targets.labels.begin(), targets.labels.end(), label);
                if (it == targets.labels.end()) {
                    throw nowcast::ValidationError(std::string(path) + ": no target for '" + label + "'");
                }
                out.push_back(targets.values[static_cast<std::size_t>(it - targets.labels.begin())]);
            }
            if (targets.labels.size() != labels.size()) {
                throw nowcast::ValidationError(std::string(path) + ": targets name categories absent from the seed");
            }
            return out;
        };
        const auto rows = order(nowcast::load_targets(row_targets_path), seed.row_labels, row_targets_path);
        const auto cols = order(nowcast::load_targets(col_targets_path), seed.col_labels, col_targets_path);
        nowcast::IpfOptions options;
        if (tolerance > 0.0) {
            options.tol = tolerance;
        }
        if (max_iterations > 0) {
            options.max_iter = max_iterations;
        }
        const auto result = nowcast::ipf(seed, rows, cols, options);
        *csv = copy_string(nowcast::matrix_csv(result.fitted));
        if (iterations) {
            *iterations = result.iterations;
        }
    });
}

} // extern "C"
