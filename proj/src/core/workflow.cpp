#include "core/workflow.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/version.hpp"

#include <functional>
#include <sstream>

namespace nowcast {

namespace {

std::filesystem::path policy_dir_of(const RunRequest &request) {
    return request.policy_dir.empty() ? request.data_dir / "policy" : request.policy_dir;
}

class IssueCollector {
  public:
    void run(const std::function<void()> &step) {
        try {
            step();
        } catch (const ValidationError &e) {
            issues_.insert(issues_.end(), e.issues().begin(), e.issues().end());
        } catch (const IoError &e) {
            if (!io_error_) {
                io_error_ = e.what();
            }
        }
    }

    void raise() const {
        if (io_error_) {
            throw IoError(*io_error_);
        }
        if (!issues_.empty()) {
            throw ValidationError(issues_);
        }
    }

  private:
    std::vector<Issue> issues_;
    std::optional<std::string> io_error_;
};

std::string booking_name(CapitalBooking booking) {
    return booking == CapitalBooking::amortised ? "amortised" : "once";
}

SynthConfig synth_config_of(const RunRequest &request) {
    return request.synth_config->empty() ? SynthConfig::defaults() : load_synth_config(*request.synth_config);
}

} // namespace

std::filesystem::path default_data_dir() {
#ifdef NOWCAST_DEFAULT_DATA_DIR
    return NOWCAST_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

PreparedRun prepare_run(const RunRequest &request) {
    if (request.population_dir.has_value() == request.synth_config.has_value()) {
        throw ValidationError("give exactly one of a population directory or a synthetic population config");
    }
    if (request.scenario.empty()) {
        throw ValidationError("a scenario file is required");
    }
    const auto policy_dir = policy_dir_of(request);
    IssueCollector collector;
    std::optional<ScenarioConfig> scenario;
    std::optional<ModelInputs> inputs;
    std::optional<ControlTotals> controls;
    std::optional<Population> population;
    collector.run([&] { scenario = load_scenario(request.scenario); });
    collector.run([&] { inputs = ModelInputs::load(request.data_dir, policy_dir); });
    if (scenario) {
        if (request.seed) {
            scenario->seed = *request.seed;
        }
        collector.run([&] { controls = ControlTotals::load(scenario->controls); });
        for (const auto &wave : scenario->waves) {
            if (wave.controls) {
                collector.run([&] { ControlTotals::load(*wave.controls); });
            }
        }
    }
    const std::uint64_t seed = scenario ? scenario->seed : request.seed.value_or(ScenarioConfig{}.seed);
    collector.run([&] {
        population = request.population_dir ? load_population(*request.population_dir)
                                            : generate_synthetic(synth_config_of(request), seed);
    });
    collector.raise();

    RunManifest manifest;
    manifest.version = std::string(kVersion);
    manifest.seed = scenario->seed;
    manifest.employer_top_up = scenario->employer_top_up;
    manifest.capital_booking = booking_name(scenario->capital_booking);
    manifest.schedule_digest = directory_digest(policy_dir);
    manifest.inputs.push_back({"scenario", sha256_file(request.scenario)});
    manifest.inputs.push_back({"controls", sha256_file(scenario->controls)});
    for (const auto &wave : scenario->waves) {
        if (wave.controls) {
            manifest.inputs.push_back({"controls:" + wave.label, sha256_file(*wave.controls)});
        }
        manifest.waves.emplace_back(wave.label, format_date(wave.date));
    }
    if (request.population_dir) {
        manifest.inputs.push_back({"population/households.csv", sha256_file(*request.population_dir / "households.csv")});
        manifest.inputs.push_back({"population/persons.csv", sha256_file(*request.population_dir / "persons.csv")});
    } else {
        manifest.inputs.push_back({"synth", sha256_hex(render_synth_config(synth_config_of(request)))});
    }
    for (const auto &file : ModelInputs::files(request.data_dir, policy_dir)) {
        manifest.inputs.push_back({"data/" + file.filename().string(), sha256_file(file)});
    }

    RunOptions options;
    options.seed = scenario->seed;
    options.threads = resolve_threads(request.threads);
    options.employer_top_up = scenario->employer_top_up;
    options.capital_booking = scenario->capital_booking;
    return PreparedRun{std::move(*scenario), std::move(*population), std::move(*inputs), std::move(*controls),
                       options, std::move(manifest)};
}

std::vector<OutputFile> execute_run(const PreparedRun &run) {
    const Engine engine(run.inputs, run.controls, run.options);
    const auto result = engine.run(run.population, run.scenario.waves);
    auto files = render_tables(result);
    files.push_back({"manifest.json", render_manifest(run.manifest)});
    return files;
}

std::string describe_config(const RunRequest &request) {
    std::ostringstream out;
    out << "# nowcast " << kVersion << "\n";
    out << "data_dir = " << request.data_dir.string() << "\n";
    out << "policy_dir = " << policy_dir_of(request).string() << "\n";
    out << "threads = " << request.threads << "\n";
    if (request.population_dir) {
        out << "population = " << request.population_dir->string() << "\n";
    }
    if (!request.scenario.empty()) {
        auto scenario = load_scenario(request.scenario);
        if (request.seed) {
            scenario.seed = *request.seed;
        }
        out << "\n# scenario\n" << render_scenario(scenario);
    } else {
        out << "seed = " << request.seed.value_or(ScenarioConfig{}.seed) << "\n";
    }
    if (request.synth_config) {
        out << "\n# synthetic population\n" << render_synth_config(synth_config_of(request));
    }
    const auto tax = load_tax_system(request.data_dir / "tax_system.cfg");
    out << "\n# tax system\n" << render_tax_system(tax);
    return out.str();
}

} // namespace nowcast
