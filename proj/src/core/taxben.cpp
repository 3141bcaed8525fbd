#include "core/taxben.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nowcast {

namespace {

std::int64_t divide_rounded(std::int64_t numerator, std::int64_t denominator) {
    const std::int64_t q = numerator / denominator;
    const std::int64_t r = numerator % denominator;
    if (2 * std::llabs(r) >= denominator) {
        return numerator >= 0 ? q + 1 : q - 1;
    }
    return q;
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') {
            ++i;
        }
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ') {
            ++i;
        }
        if (i > start) {
            out.emplace_back(text.substr(start, i - start));
        }
    }
    return out;
}

} // namespace

std::optional<Rate> Rate::parse(std::string_view text) {
    const auto value = parse_double(text);
    if (!value || *value < 0.0 || *value > 1.0) {
        return std::nullopt;
    }
    return Rate{std::llround(*value * 1e6)};
}

Money Rate::apply(Money amount) const { return Money::from_cents(divide_rounded(amount.cents() * ppm, 1000000)); }

std::string Rate::str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value());
    return buf;
}

std::optional<BandRule> BandRule::parse(std::string_view text) {
    const auto w = words(trim(text));
    BandRule rule;
    if (w.size() == 1 && (w[0] == "none" || w[0] == "0")) {
        return rule;
    }
    if (w.size() == 1) {
        const auto amount = Money::parse(w[0]);
        if (!amount || amount->cents() < 0) {
            return std::nullopt;
        }
        rule.amount = *amount;
        return rule;
    }
    if (w[0] == "rate" && (w.size() == 2 || (w.size() == 4 && w[2] == "cap"))) {
        const auto rate = Rate::parse(w[1]);
        if (!rate) {
            return std::nullopt;
        }
        rule.kind = Kind::rate;
        rule.rate = *rate;
        if (w.size() == 4) {
            const auto cap = Money::parse(w[3]);
            if (!cap || cap->cents() < 0) {
                return std::nullopt;
            }
            rule.cap = *cap;
        }
        return rule;
    }
    if (w[0] == "taper" && w.size() == 4 && w[2] == "until") {
        const auto amount = Money::parse(w[1]);
        const auto end = Money::parse(w[3]);
        if (!amount || !end || amount->cents() < 0) {
            return std::nullopt;
        }
        rule.kind = Kind::taper;
        rule.amount = *amount;
        rule.taper_end = *end;
        return rule;
    }
    return std::nullopt;
}

std::string BandRule::str() const {
    switch (kind) {
    case Kind::flat:
        return amount.cents() == 0 ? "none" : amount.str();
    case Kind::rate:
        return "rate " + rate.str() + (cap ? " cap " + cap->str() : "");
    case Kind::taper:
        return "taper " + amount.str() + " until " + taper_end.str();
    }
    return "?";
}

bool Schedule::in_force(Date date) const {
    return !regimes.empty() && date >= regimes.front().effective_from && (!ends || date < *ends);
}

const Regime &Schedule::at(Date date) const {
    if (!in_force(date)) {
        std::string life = regimes.empty() ? "(empty)" : "from " + format_date(regimes.front().effective_from);
        if (ends) {
            life += " until " + format_date(*ends);
        }
        throw DomainError(scheme + " is not in force on " + format_date(date) + "; scheme runs " + life);
    }
    const auto it = std::upper_bound(regimes.begin(), regimes.end(), date,
                                     [](Date d, const Regime &r) { return d < r.effective_from; });
    return *(it - 1);
}

Money Schedule::evaluate(Money earnings, Date date) const {
    if (earnings.cents() < 0) {
        throw DomainError(scheme + ": earnings must be non-negative");
    }
    const Regime &regime = at(date);
    const auto it = std::upper_bound(regime.bands.begin(), regime.bands.end(), earnings,
                                     [](Money e, const Band &b) { return e < b.lower; });
    const Band &band = *(it - 1);
    const BandRule &rule = band.rule;
    switch (rule.kind) {
    case BandRule::Kind::flat:
        return rule.amount;
    case BandRule::Kind::rate: {
        const Money paid = rule.rate.apply(earnings);
        return rule.cap ? std::min(paid, *rule.cap) : paid;
    }
    case BandRule::Kind::taper: {
        if (earnings >= rule.taper_end) {
            return Money{};
        }
        const std::int64_t span = rule.taper_end.cents() - band.lower.cents();
        const std::int64_t left = rule.taper_end.cents() - earnings.cents();
        return Money::from_cents(divide_rounded(rule.amount.cents() * left, span));
    }
    }
    return Money{};
}

PolicySchedules::PolicySchedules(std::map<std::string, Schedule, std::less<>> schedules)
    : schedules_(std::move(schedules)) {}

PolicySchedules PolicySchedules::load(const std::filesystem::path &dir) {
    const auto path = dir / "schedules.csv";
    return parse(read_text_file(path), path.string());
}

PolicySchedules PolicySchedules::parse(std::string_view text, std::string source) {
    const auto table = DelimitedTable::parse(text, std::move(source));
    table.require_columns({"scheme", "effective_from", "band_lower", "value"});
    std::vector<Issue> issues;
    std::map<std::string, Schedule, std::less<>> schedules;
    for (const auto &row : table.rows()) {
        const auto &scheme = table.field(row, "scheme");
        const auto date = parse_date(table.field(row, "effective_from"));
        const auto lower = Money::parse(table.field(row, "band_lower"));
        const auto &value = table.field(row, "value");
        if (scheme.empty()) {
            issues.push_back(Issue{table.source(), row.line, "scheme", "empty scheme name"});
            continue;
        }
        if (!date) {
            issues.push_back(Issue{table.source(), row.line, "effective_from", "expected a YYYY-MM-DD date"});
            continue;
        }
        if (!lower || lower->cents() < 0) {
            issues.push_back(Issue{table.source(), row.line, "band_lower", "expected a non-negative amount"});
            continue;
        }
        auto &schedule = schedules[scheme];
        schedule.scheme = scheme;
        if (schedule.ends) {
            issues.push_back(Issue{table.source(), row.line, "effective_from", scheme + " has rows after its end"});
            continue;
        }
        if (trim(value) == "end") {
            if (!schedule.regimes.empty() && *date <= schedule.regimes.back().effective_from) {
                issues.push_back(Issue{table.source(), row.line, "effective_from", scheme + " ends before it starts"});
            }
            schedule.ends = *date;
            continue;
        }
        const auto rule = BandRule::parse(value);
        if (!rule) {
            issues.push_back(Issue{table.source(), row.line, "value", "cannot parse band rule '" + value + "'"});
            continue;
        }
        if (schedule.regimes.empty() || schedule.regimes.back().effective_from != *date) {
            if (!schedule.regimes.empty() && *date < schedule.regimes.back().effective_from) {
                issues.push_back(Issue{table.source(), row.line, "effective_from", scheme + " regimes are not date ordered"});
                continue;
            }
            if (lower->cents() != 0) {
                issues.push_back(Issue{table.source(), row.line, "band_lower", "first band of a regime must start at 0"});
            }
            schedule.regimes.push_back(Regime{*date, {}});
        } else if (*lower <= schedule.regimes.back().bands.back().lower) {
            issues.push_back(Issue{table.source(), row.line, "band_lower", "band lower bounds must strictly increase"});
            continue;
        }
        if (rule->kind == BandRule::Kind::taper && rule->taper_end <= *lower) {
            issues.push_back(Issue{table.source(), row.line, "value", "taper must end above the band's lower bound"});
            continue;
        }
        schedule.regimes.back().bands.push_back(Band{*lower, *rule});
    }
    for (const auto &[name, schedule] : schedules) {
        if (name == "pup") {
            for (const auto &regime : schedule.regimes) {
                for (const auto &band : regime.bands) {
                    if (band.rule.kind != BandRule::Kind::flat || band.rule.amount.cents() <= 0) {
                        issues.push_back(Issue{table.source(), 0, "value", "pup bands must be positive flat payments"});
                    }
                }
            }
        }
    }
    for (const char *required : {"pup", "twss", "ewss"}) {
        if (!schedules.contains(std::string_view(required)) || schedules.find(std::string_view(required))->second.regimes.empty()) {
            issues.push_back(Issue{table.source(), 0, "scheme", std::string("missing schedule '") + required + "'"});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return PolicySchedules(std::move(schedules));
}

const Schedule &PolicySchedules::schedule(std::string_view scheme) const {
    const auto it = schedules_.find(scheme);
    if (it == schedules_.end()) {
        throw DomainError("no schedule for '" + std::string(scheme) + "'");
    }
    return it->second;
}

Money PolicySchedules::pup_rate(Money prev_weekly_earnings, Date date) const {
    return schedule("pup").evaluate(prev_weekly_earnings, date);
}

Money PolicySchedules::ceib_rate(Date date, std::optional<Money> prev_weekly_earnings) const {
    const auto &pup = schedule("pup");
    if (prev_weekly_earnings) {
        return pup.evaluate(*prev_weekly_earnings, date);
    }
    Money top;
    for (const auto &band : pup.at(date).bands) {
        top = std::max(top, band.rule.amount);
    }
    return top;
}

Money PolicySchedules::twss_subsidy(Money avg_take_home, Date date) const {
    return schedule("twss").evaluate(avg_take_home, date);
}

Money PolicySchedules::ewss_subsidy(Money gross_weekly, Date date) const {
    return schedule("ewss").evaluate(gross_weekly, date);
}

Money PolicySchedules::wage_subsidy(Money gross_weekly, Money take_home_weekly, Date date) const {
    const auto &twss = schedule("twss");
    if (twss.in_force(date)) {
        return twss.evaluate(take_home_weekly, date);
    }
    const auto &ewss = schedule("ewss");
    if (ewss.in_force(date) && (!twss.ends || date >= *twss.ends)) {
        return ewss.evaluate(gross_weekly, date);
    }
    return Money{};
}

void TaxSystem::validate() const {
    std::vector<Issue> issues;
    const auto fail = [&](std::string message) { issues.push_back(Issue{"tax system", 0, "", std::move(message)}); };
    if (bands.empty()) {
        fail("at least one tax band is required");
    } else if (bands.front().threshold.cents() != 0) {
        fail("the first tax band must start at 0");
    }
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].rate.ppm < 0 || bands[i].rate.ppm > 1000000) {
            fail("tax rates must lie in [0,1]");
        }
        if (i > 0 && bands[i].threshold <= bands[i - 1].threshold) {
            fail("tax band thresholds must increase");
        }
    }
    if (social_insurance_rate.ppm < 0 || social_insurance_rate.ppm > 1000000) {
        fail("social insurance rate must lie in [0,1]");
    }
    for (const Money m : {credits, social_insurance_floor, unemployment_weekly, illness_weekly, pension_weekly,
                          child_benefit_monthly}) {
        if (m.cents() < 0) {
            fail("credits, floors and benefit rates must be non-negative");
            break;
        }
    }
    if (pension_age <= 0 || child_benefit_age < 0) {
        fail("ages must be positive");
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

double TaxSystem::top_marginal_rate() const {
    Rate top{};
    for (const auto &band : bands) {
        top = std::max(top, band.rate);
    }
    return top.value() + social_insurance_rate.value();
}

TaxSystem parse_tax_system(std::string_view text, std::string source) {
    const auto file = KeyValueFile::parse(text, std::move(source));
    TaxSystem system;
    std::vector<Issue> issues;
    bool bands_seen = false;
    for (const auto &section : file.sections()) {
        if (!section.name.empty()) {
            issues.push_back(Issue{file.source(), section.line, "", "unexpected section [" + section.name + "]"});
            continue;
        }
        for (const auto &entry : section.entries) {
            const auto money = [&](Money &out) {
                const auto v = Money::parse(entry.value);
                if (!v) {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "expected an amount"});
                } else {
                    out = *v;
                }
            };
            const auto rate = [&](Rate &out) {
                const auto v = Rate::parse(entry.value);
                if (!v) {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "expected a rate in [0,1]"});
                } else {
                    out = *v;
                }
            };
            const auto integer = [&](int &out) {
                const auto v = parse_integer(entry.value);
                if (!v) {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "expected an integer"});
                } else {
                    out = static_cast<int>(*v);
                }
            };
            if (entry.key == "tax_band") {
                // "<threshold> <rate>"
                const auto w = words(entry.value);
                const auto threshold = w.size() == 2 ? Money::parse(w[0]) : std::nullopt;
                const auto r = w.size() == 2 ? Rate::parse(w[1]) : std::nullopt;
                if (!threshold || !r) {
                    issues.push_back(Issue{file.source(), entry.line, entry.key, "expected '<threshold> <rate>'"});
                    continue;
                }
                if (!bands_seen) {
                    system.bands.clear();
                    bands_seen = true;
                }
                system.bands.push_back(TaxBand{*threshold, *r});
            } else if (entry.key == "tax_credits") {
                money(system.credits);
            } else if (entry.key == "social_insurance_rate") {
                rate(system.social_insurance_rate);
            } else if (entry.key == "social_insurance_floor") {
                money(system.social_insurance_floor);
            } else if (entry.key == "unemployment_weekly") {
                money(system.unemployment_weekly);
            } else if (entry.key == "illness_weekly") {
                money(system.illness_weekly);
            } else if (entry.key == "pension_weekly") {
                money(system.pension_weekly);
            } else if (entry.key == "child_benefit_monthly") {
                money(system.child_benefit_monthly);
            } else if (entry.key == "pension_age") {
                integer(system.pension_age);
            } else if (entry.key == "child_benefit_age") {
                integer(system.child_benefit_age);
            } else {
                issues.push_back(Issue{file.source(), entry.line, entry.key, "unknown key"});
            }
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    system.validate();
    return system;
}

TaxSystem load_tax_system(const std::filesystem::path &path) {
    return parse_tax_system(read_text_file(path), path.string());
}

std::string render_tax_system(const TaxSystem &system) {
    std::string out;
    for (const auto &band : system.bands) {
        out += "tax_band = " + band.threshold.str() + " " + band.rate.str() + "\n";
    }
    out += "tax_credits = " + system.credits.str() + "\n";
    out += "social_insurance_rate = " + system.social_insurance_rate.str() + "\n";
    out += "social_insurance_floor = " + system.social_insurance_floor.str() + "\n";
    out += "unemployment_weekly = " + system.unemployment_weekly.str() + "\n";
    out += "illness_weekly = " + system.illness_weekly.str() + "\n";
    out += "pension_weekly = " + system.pension_weekly.str() + "\n";
    out += "child_benefit_monthly = " + system.child_benefit_monthly.str() + "\n";
    out += "pension_age = " + std::to_string(system.pension_age) + "\n";
    out += "child_benefit_age = " + std::to_string(system.child_benefit_age) + "\n";
    return out;
}

Money income_tax(Money taxable, const TaxSystem &system) {
    if (taxable.cents() < 0) {
        throw DomainError("taxable income must be non-negative");
    }
    Money band_tax;
    for (std::size_t i = 0; i < system.bands.size(); ++i) {
        const Money lower = system.bands[i].threshold;
        if (taxable <= lower) {
            break;
        }
        const Money upper = i + 1 < system.bands.size() ? std::min(taxable, system.bands[i + 1].threshold) : taxable;
        band_tax += system.bands[i].rate.apply(upper - lower);
    }
    Money tax = std::max(Money{}, band_tax - system.credits);
    if (taxable > system.social_insurance_floor) {
        tax += system.social_insurance_rate.apply(taxable - system.social_insurance_floor);
    }
    return tax;
}

Money take_home_weekly(Money gross_weekly, const TaxSystem &system) {
    const Money annual = Money::from_cents(std::max<std::int64_t>(0, gross_weekly.cents()) * 52);
    const Money tax = income_tax(annual, system);
    return gross_weekly - Money::from_cents((tax.cents() + 26) / 52);
}

TaxBenefit person_T_and_B(const PersonIncome &person, const PolicySchedules &schedules, const TaxSystem &system,
                          const PolicyState &policy) {
    TaxBenefit out;
    Money weekly_benefit;
    if (person.age >= system.pension_age) {
        weekly_benefit += system.pension_weekly;
    } else if (person.work_status == WorkStatus::unemployed) {
        weekly_benefit += system.unemployment_weekly;
    }

    Money employment = person.employment; // annual, paid by the employer
    Money subsidy_annual;
    switch (person.covid_state) {
    case CovidState::none:
        break;
    case CovidState::pup_recipient:
        if (policy.pup) {
            out.covid_weekly = schedules.pup_rate(person.prev_weekly_earnings, policy.date);
        } else if (weekly_benefit.cents() == 0) {
            weekly_benefit += system.unemployment_weekly;
        }
        break;
    case CovidState::ceib_recipient:
        if (policy.ceib) {
            const std::optional<Money> prev = person.prev_weekly_earnings.cents() > 0
                                                  ? std::optional<Money>(person.prev_weekly_earnings)
                                                  : std::nullopt;
            out.covid_weekly = schedules.ceib_rate(policy.date, prev);
        } else {
            weekly_benefit += system.illness_weekly;
        }
        break;
    case CovidState::wage_subsidised:
        if (policy.subsidy) {
            const Money gross_weekly = Money::from_cents((employment.cents() + 26) / 52);
            const Money s = schedules.wage_subsidy(gross_weekly, take_home_weekly(gross_weekly, system), policy.date);
            out.subsidy = weekly_to_monthly(s);
            subsidy_annual = Money::from_cents(s.cents() * 52);
            employment = std::max(Money{}, employment - subsidy_annual).scaled(policy.employer_top_up);
        }
        break;
    }

    const Money taxable = std::max(Money{}, employment + std::max(Money{}, person.self_employment) + person.capital +
                                                person.pension + subsidy_annual);
    out.market = annual_to_monthly(employment) + annual_to_monthly(person.self_employment) +
                 annual_to_monthly(person.capital) + annual_to_monthly(person.pension);
    out.tax = annual_to_monthly(income_tax(taxable, system));
    out.covid = weekly_to_monthly(out.covid_weekly);
    out.benefits = weekly_to_monthly(weekly_benefit) + out.covid + out.subsidy;
    return out;
}

TaxBenefit household_T_and_B(const std::vector<PersonIncome> &members, const PolicySchedules &schedules,
                             const TaxSystem &system, const PolicyState &policy) {
    TaxBenefit total;
    for (const auto &member : members) {
        const auto person = person_T_and_B(member, schedules, system, policy);
        total.market += person.market;
        total.benefits += person.benefits;
        total.tax += person.tax;
        total.subsidy += person.subsidy;
        total.covid += person.covid;
        total.covid_weekly += person.covid_weekly;
        if (member.age < system.child_benefit_age) {
            total.benefits += system.child_benefit_monthly;
        }
    }
    return total;
}

} // namespace nowcast
