#include "core/scenario.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace nowcast {

namespace {

bool known_control_key(std::string_view key, std::string &problem) {
    static const std::set<std::string, std::less<>> kScalars{"wage_index",         "home_working_share",
                                                             "mortgage_deferrals", "mortgage_accounts",
                                                             "index_change_factor"};
    if (kScalars.contains(key)) {
        return true;
    }
    const auto colon = key.find(':');
    if (colon == std::string_view::npos) {
        problem = "unknown control key '" + std::string(key) + "'";
        return false;
    }
    const auto head = key.substr(0, colon);
    const auto tail = key.substr(colon + 1);
    if (head == "pup" || head == "ceib" || head == "subsidy") {
        if (!parse_sector(tail)) {
            problem = "unknown sector '" + std::string(tail) + "'";
            return false;
        }
        return true;
    }
    if (head == "cases_in_work" || head == "cases_out_of_work") {
        if (std::find(kCaseAgeBands.begin(), kCaseAgeBands.end(), tail) == kCaseAgeBands.end()) {
            problem = "unknown case age band '" + std::string(tail) + "'";
            return false;
        }
        return true;
    }
    if (head == "employment_rate") {
        if (std::find(kEmploymentBands.begin(), kEmploymentBands.end(), tail) == kEmploymentBands.end()) {
            problem = "unknown employment age band '" + std::string(tail) + "'";
            return false;
        }
        return true;
    }
    problem = "unknown control key '" + std::string(key) + "'";
    return false;
}

} // namespace

ControlTotals ControlTotals::load(const std::filesystem::path &path) {
    return parse(read_text_file(path), path.filename().string());
}

ControlTotals ControlTotals::parse(std::string_view text, std::string source) {
    const auto table = DelimitedTable::parse(text, std::move(source));
    table.require_columns({"stratum_key", "date", "target"});
    ControlTotals out;
    std::vector<Issue> issues;
    for (const auto &row : table.rows()) {
        const auto &key = table.field(row, "stratum_key");
        const auto date = parse_date(table.field(row, "date"));
        const auto value = parse_double(table.field(row, "target"));
        std::string problem;
        if (!known_control_key(key, problem)) {
            issues.push_back(Issue{table.source(), row.line, "stratum_key", problem});
            continue;
        }
        if (!date) {
            issues.push_back(Issue{table.source(), row.line, "date", "expected a YYYY-MM-DD date"});
            continue;
        }
        if (!value) {
            issues.push_back(Issue{table.source(), row.line, "target", "expected a number"});
            continue;
        }
        const bool signed_ok = key == "index_change_factor";
        if (!signed_ok && *value < 0.0) {
            issues.push_back(Issue{table.source(), row.line, "target", "control totals must be non-negative"});
            continue;
        }
        if ((key.starts_with("employment_rate:") || key == "home_working_share") && *value > 1.0) {
            issues.push_back(Issue{table.source(), row.line, "target", "rates and shares must not exceed 1"});
            continue;
        }
        auto &points = out.series_[key];
        if (std::any_of(points.begin(), points.end(), [&](const Point &p) { return p.date == *date; })) {
            issues.push_back(Issue{table.source(), row.line, "date", "duplicate date for " + key});
            continue;
        }
        points.push_back(Point{*date, *value});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    for (auto &[key, points] : out.series_) {
        std::sort(points.begin(), points.end(), [](const Point &a, const Point &b) { return a.date < b.date; });
    }
    return out;
}

std::optional<double> ControlTotals::value(std::string_view key, Date date) const {
    const auto it = series_.find(key);
    if (it == series_.end()) {
        return std::nullopt;
    }
    std::optional<double> out;
    for (const auto &point : it->second) {
        if (point.date <= date) {
            out = point.value;
        }
    }
    return out;
}

double ControlTotals::value_or(std::string_view key, Date date, double fallback) const {
    return value(key, date).value_or(fallback);
}

double ControlTotals::interpolated(std::string_view key, Date date) const {
    const auto it = series_.find(key);
    if (it == series_.end() || it->second.empty()) {
        return 0.0;
    }
    const auto &points = it->second;
    if (date < points.front().date) {
        return 0.0;
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (date >= points[i].date && date < points[i + 1].date) {
            const double span = static_cast<double>((points[i + 1].date - points[i].date).count());
            const double into = static_cast<double>((date - points[i].date).count());
            return points[i].value + (points[i + 1].value - points[i].value) * into / span;
        }
    }
    return points.back().value;
}

void ControlTotals::merge(const ControlTotals &other) {
    for (const auto &[key, points] : other.series_) {
        series_[key] = points;
    }
}

std::size_t case_age_band(int age) {
    if (age < 1) return 0;
    if (age < 5) return 1;
    if (age < 15) return 2;
    if (age < 25) return 3;
    if (age < 35) return 4;
    if (age < 45) return 5;
    if (age < 55) return 6;
    if (age < 65) return 7;
    return 8;
}

std::size_t employment_age_band(int age) {
    if (age < 25) return 0;
    if (age < 35) return 1;
    if (age < 45) return 2;
    if (age < 55) return 3;
    if (age < 66) return 4;
    return 5;
}

SectorReference SectorReference::load(const std::filesystem::path &path) {
    const auto table = DelimitedTable::read(path);
    table.require_columns({"sector", "national_employment", "essential_share"});
    SectorReference out;
    std::array<bool, kSectorCount> seen{};
    std::vector<Issue> issues;
    for (const auto &row : table.rows()) {
        const auto &code = table.field(row, "sector");
        const auto sector = parse_sector(code);
        if (!sector) {
            issues.push_back(Issue{table.source(), row.line, "sector", "unknown sector '" + code + "'"});
            continue;
        }
        const auto s = static_cast<std::size_t>(*sector);
        if (seen[s]) {
            issues.push_back(Issue{table.source(), row.line, "sector", "duplicate sector '" + code + "'"});
            continue;
        }
        seen[s] = true;
        const auto employment = parse_double(table.field(row, "national_employment"));
        const auto essential = parse_double(table.field(row, "essential_share"));
        if (!employment || *employment <= 0.0) {
            issues.push_back(Issue{table.source(), row.line, "national_employment", "expected a positive number"});
        } else {
            out.national_employment[s] = *employment;
        }
        if (!essential || *essential < 0.0 || *essential > 1.0) {
            issues.push_back(Issue{table.source(), row.line, "essential_share", "expected a share in [0,1]"});
        } else {
            out.essential_share[s] = *essential;
        }
    }
    for (const auto sector : all_sectors()) {
        if (!seen[static_cast<std::size_t>(sector)]) {
            issues.push_back(Issue{table.source(), 0, "sector", "missing sector '" + std::string(sector_code(sector)) + "'"});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return out;
}

WaveSwitches WaveSwitches::instruments_off() {
    WaveSwitches s;
    s.pup = false;
    s.ceib = false;
    s.subsidy = false;
    s.childcare_support = false;
    s.deferrals = false;
    return s;
}

ScenarioConfig parse_scenario(std::string_view text, std::string source, const std::filesystem::path &base_dir) {
    const auto file = KeyValueFile::parse(text, std::move(source));
    ScenarioConfig config;
    std::vector<Issue> issues;
    const auto resolve = [&](const std::string &value) {
        const std::filesystem::path p(value);
        return p.is_absolute() ? p : base_dir / p;
    };
    bool have_run = false;
    for (const auto &entry : file.globals().entries) {
        issues.push_back(Issue{file.source(), entry.line, entry.key, "key outside a section"});
    }
    for (std::size_t k = 1; k < file.sections().size(); ++k) {
        const auto &section = file.sections()[k];
        if (section.name == "run") {
            have_run = true;
            for (const auto &entry : section.entries) {
                if (entry.key == "seed") {
                    const auto v = parse_integer(entry.value);
                    if (!v || *v < 0) {
                        issues.push_back(Issue{file.source(), entry.line, entry.key, "expected a non-negative integer"});
                    } else {
                        config.seed = static_cast<std::uint64_t>(*v);
                    }
                } else if (entry.key == "controls") {
                    config.controls = resolve(entry.value);
                } else if (entry.key == "employer_top_up") {
                    const auto v = parse_double(entry.value);
                    if (!v || *v < 0.0 || *v > 1.0) {
                        issues.push_back(Issue{file.source(), entry.line, entry.key, "expected a share in [0,1]"});
                    } else {
                        config.employer_top_up = *v;
                    }
                } else if (entry.key == "capital_booking") {
                    if (entry.value == "amortised") {
                        config.capital_booking = CapitalBooking::amortised;
                    } else if (entry.value == "once") {
                        config.capital_booking = CapitalBooking::once;
                    } else {
                        issues.push_back(Issue{file.source(), entry.line, entry.key, "expected amortised or once"});
                    }
                } else {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "unknown key in [run]"});
                }
            }
            continue;
        }
        if (!section.name.starts_with("wave ")) {
            issues.push_back(Issue{file.source(), section.line, "", "unknown section [" + section.name + "]"});
            continue;
        }
        WavePoint wave;
        wave.label = std::string(trim(std::string_view(section.name).substr(5)));
        bool have_date = false;
        for (const auto &entry : section.entries) {
            if (entry.key == "date") {
                const auto d = parse_date(entry.value);
                if (!d) {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "expected a YYYY-MM-DD date"});
                } else {
                    wave.date = *d;
                    have_date = true;
                }
                continue;
            }
            if (entry.key == "controls") {
                wave.controls = resolve(entry.value);
                continue;
            }
            bool *target = nullptr;
            if (entry.key == "pup") target = &wave.switches.pup;
            else if (entry.key == "ceib") target = &wave.switches.ceib;
            else if (entry.key == "subsidy") target = &wave.switches.subsidy;
            else if (entry.key == "childcare_support") target = &wave.switches.childcare_support;
            else if (entry.key == "deferrals") target = &wave.switches.deferrals;
            else if (entry.key == "home_working") target = &wave.switches.home_working;
            else if (entry.key == "capital_loss") target = &wave.switches.capital_loss;
            if (!target) {
                issues.push_back(Issue{file.source(), entry.line, entry.key, "unknown key in [" + section.name + "]"});
                continue;
            }
            const auto v = parse_bool(entry.value);
            if (!v) {
                issues.push_back(Issue{file.source(), entry.line, entry.key, "expected on or off"});
            } else {
                *target = *v;
            }
        }
        if (wave.label.empty()) {
            issues.push_back(Issue{file.source(), section.line, "", "wave without a label"});
        }
        if (!have_date) {
            issues.push_back(Issue{file.source(), section.line, "date", "wave '" + wave.label + "' has no date"});
            continue;
        }
        for (const auto &other : config.waves) {
            if (other.label == wave.label) {
                issues.push_back(Issue{file.source(), section.line, "", "duplicate wave label '" + wave.label + "'"});
            }
        }
        if (!config.waves.empty() && wave.date <= config.waves.back().date) {
            issues.push_back(Issue{file.source(), section.line, "date", "wave dates must increase"});
        }
        config.waves.push_back(std::move(wave));
    }
    if (!have_run) {
        issues.push_back(Issue{file.source(), 0, "", "missing [run] section"});
    } else if (config.controls.empty()) {
        issues.push_back(Issue{file.source(), 0, "controls", "[run] must name a controls file"});
    }
    if (config.waves.empty()) {
        issues.push_back(Issue{file.source(), 0, "", "no [wave ...] sections"});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return config;
}

ScenarioConfig load_scenario(const std::filesystem::path &path) {
    return parse_scenario(read_text_file(path), path.filename().string(), path.parent_path());
}

std::string render_scenario(const ScenarioConfig &config) {
    std::ostringstream out;
    const auto onoff = [](bool b) { return b ? "on" : "off"; };
    out << "[run]\n";
    out << "seed = " << config.seed << '\n';
    out << "controls = " << config.controls.string() << '\n';
    out << "employer_top_up = " << config.employer_top_up << '\n';
    out << "capital_booking = " << (config.capital_booking == CapitalBooking::once ? "once" : "amortised") << '\n';
    for (const auto &wave : config.waves) {
        out << "\n[wave " << wave.label << "]\n";
        out << "date = " << format_date(wave.date) << '\n';
        out << "pup = " << onoff(wave.switches.pup) << '\n';
        out << "ceib = " << onoff(wave.switches.ceib) << '\n';
        out << "subsidy = " << onoff(wave.switches.subsidy) << '\n';
        out << "childcare_support = " << onoff(wave.switches.childcare_support) << '\n';
        out << "deferrals = " << onoff(wave.switches.deferrals) << '\n';
        out << "home_working = " << onoff(wave.switches.home_working) << '\n';
        out << "capital_loss = " << onoff(wave.switches.capital_loss) << '\n';
        if (wave.controls) {
            out << "controls = " << wave.controls->string() << '\n';
        }
    }
    return out.str();
}

std::vector<std::filesystem::path> ModelInputs::files(const std::filesystem::path &data_dir,
                                                      const std::filesystem::path &policy_dir) {
    std::vector<std::filesystem::path> out;
    for (const char *name : {"coefficients.csv", "residual_scales.csv", "commute_costs.csv", "childcare_costs.csv",
                             "capital_participation.csv", "capital_holdings.csv", "sector_reference.csv",
                             "tax_system.cfg"}) {
        if (std::string_view(name) == "residual_scales.csv" && !std::filesystem::exists(data_dir / name)) {
            continue;
        }
        out.push_back(data_dir / name);
    }
    out.push_back(policy_dir / "schedules.csv");
    return out;
}

ModelInputs ModelInputs::load(const std::filesystem::path &data_dir, const std::filesystem::path &policy_dir) {
    ModelInputs inputs;
    std::vector<Issue> issues;
    const auto collect = [&](auto &&step) {
        try {
            step();
        } catch (const ValidationError &e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    };
    const auto scales = data_dir / "residual_scales.csv";
    collect([&] {
        inputs.coefficients = CoefficientTable::load(
            data_dir / "coefficients.csv",
            std::filesystem::exists(scales) ? std::optional<std::filesystem::path>(scales) : std::nullopt);
    });
    collect([&] { inputs.commute = CommuteCostTable::load(data_dir / "commute_costs.csv"); });
    collect([&] { inputs.childcare = ChildcareCostGrid::load(data_dir / "childcare_costs.csv"); });
    collect([&] {
        inputs.capital = CapitalHoldingsGrid::load(data_dir / "capital_participation.csv",
                                                   data_dir / "capital_holdings.csv", 0.0);
    });
    collect([&] { inputs.sectors = SectorReference::load(data_dir / "sector_reference.csv"); });
    collect([&] { inputs.tax = load_tax_system(data_dir / "tax_system.cfg"); });
    collect([&] { inputs.schedules = PolicySchedules::load(policy_dir); });
    if (issues.empty()) {
        for (const char *model : {"public_transport", "private_transport", "childcare_participation",
                                  "childcare_expenditure", "at_work", "log_employment_income", "job_loss",
                                  "wage_subsidy"}) {
            if (!inputs.coefficients.contains(model)) {
                issues.push_back(Issue{(data_dir / "coefficients.csv").filename().string(), 0, "model_name",
                                       std::string("missing model '") + model + "'"});
            }
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return inputs;
}

} // namespace nowcast
