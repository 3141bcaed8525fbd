#include "core/igm.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"

#include <algorithm>
#include <cmath>

namespace nowcast {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::logit:
        return "logit";
    case ModelKind::multinomial:
        return "multinomial";
    case ModelKind::linear:
        return "linear";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    if (text == "logit") return ModelKind::logit;
    if (text == "multinomial") return ModelKind::multinomial;
    if (text == "linear") return ModelKind::linear;
    return std::nullopt;
}

bool is_dummy_covariate(std::string_view name) { return name.starts_with("d_"); }

void CoefficientSet::validate() const {
    std::vector<Issue> issues;
    const auto fail = [&](std::string message) { issues.push_back(Issue{name, 0, "", std::move(message)}); };
    if (coefficients.empty()) {
        fail("model has no coefficient rows");
    }
    if (kind != ModelKind::multinomial && coefficients.size() != 1) {
        fail("logit and linear models take exactly one coefficient row");
    }
    if (intercepts.size() != coefficients.size() || outcomes.size() != coefficients.size()) {
        fail("one intercept and outcome label per coefficient row required");
    }
    for (const auto &row : coefficients) {
        if (row.size() != covariates.size()) {
            fail("coefficient row length differs from covariate count");
        }
        for (const double beta : row) {
            if (!std::isfinite(beta)) {
                fail("non-finite coefficient");
            }
        }
    }
    if (!(residual_scale >= 0.0) || !std::isfinite(residual_scale)) {
        fail("residual scale must be finite and non-negative");
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

double CoefficientSet::index(const Covariates &values, std::size_t row) const {
    for (const auto &[key, value] : values) {
        if (std::find(covariates.begin(), covariates.end(), key) == covariates.end()) {
            throw DomainError("model " + name + ": unknown covariate '" + key + "'");
        }
    }
    double sum = intercepts.at(row);
    const auto &betas = coefficients.at(row);
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        const auto it = values.find(covariates[i]);
        double x = 0.0;
        if (it != values.end()) {
            x = it->second;
        } else if (!is_dummy_covariate(covariates[i])) {
            throw DomainError("model " + name + ": missing continuous covariate '" + covariates[i] + "'");
        }
        sum += betas[i] * x;
    }
    if (!std::isfinite(sum)) {
        throw DomainError("model " + name + ": non-finite linear index");
    }
    return sum;
}

CoefficientTable::CoefficientTable(std::vector<CoefficientSet> models) : models_(std::move(models)) {
    for (const auto &model : models_) {
        model.validate();
    }
}

CoefficientTable CoefficientTable::load(const std::filesystem::path &coefficients,
                                        const std::optional<std::filesystem::path> &scales) {
    const auto table = DelimitedTable::read(coefficients);
    table.require_columns({"model_name", "kind", "outcome", "covariate", "value"});
    std::vector<Issue> issues;
    std::vector<CoefficientSet> models;
    // (model, outcome, covariate) -> value, collected first so rows may come in any order.
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> cells;
    std::map<std::string, std::vector<std::string>> outcome_order;
    std::map<std::string, std::vector<std::string>> covariate_order;

    for (const auto &row : table.rows()) {
        const auto &name = table.field(row, "model_name");
        const auto &kind_text = table.field(row, "kind");
        const auto &outcome = table.field(row, "outcome");
        const auto &covariate = table.field(row, "covariate");
        const auto kind = parse_model_kind(kind_text);
        const auto value = parse_double(table.field(row, "value"));
        if (!kind) {
            issues.push_back(Issue{table.source(), row.line, "kind", "unknown model kind '" + kind_text + "'"});
            continue;
        }
        if (!value) {
            issues.push_back(Issue{table.source(), row.line, "value", "expected a number"});
            continue;
        }
        auto it = std::find_if(models.begin(), models.end(), [&](const auto &m) { return m.name == name; });
        if (it == models.end()) {
            CoefficientSet model;
            model.name = name;
            model.kind = *kind;
            models.push_back(model);
            it = models.end() - 1;
        } else if (it->kind != *kind) {
            issues.push_back(Issue{table.source(), row.line, "kind", "model " + name + " mixes kinds"});
            continue;
        }
        auto &outcomes = outcome_order[name];
        if (std::find(outcomes.begin(), outcomes.end(), outcome) == outcomes.end()) {
            outcomes.push_back(outcome);
        }
        if (covariate != "_constant") {
            auto &covs = covariate_order[name];
            if (std::find(covs.begin(), covs.end(), covariate) == covs.end()) {
                covs.push_back(covariate);
            }
        }
        if (!cells[name][outcome].emplace(covariate, *value).second) {
            issues.push_back(Issue{table.source(), row.line, "covariate",
                                   "duplicate coefficient " + name + "/" + outcome + "/" + covariate});
        }
    }

    for (auto &model : models) {
        model.covariates = covariate_order[model.name];
        model.outcomes = outcome_order[model.name];
        for (const auto &outcome : model.outcomes) {
            const auto &row_cells = cells[model.name][outcome];
            const auto constant = row_cells.find("_constant");
            if (constant == row_cells.end()) {
                issues.push_back(Issue{table.source(), 0, "covariate",
                                       "model " + model.name + " outcome " + outcome + " has no _constant row"});
            }
            model.intercepts.push_back(constant == row_cells.end() ? 0.0 : constant->second);
            std::vector<double> betas;
            for (const auto &cov : model.covariates) {
                const auto it = row_cells.find(cov);
                betas.push_back(it == row_cells.end() ? 0.0 : it->second);
            }
            model.coefficients.push_back(std::move(betas));
        }
    }

    if (scales) {
        const auto scale_table = DelimitedTable::read(*scales);
        scale_table.require_columns({"model_name", "scale"});
        for (const auto &row : scale_table.rows()) {
            const auto &name = scale_table.field(row, "model_name");
            const auto value = parse_double(scale_table.field(row, "scale"));
            auto it = std::find_if(models.begin(), models.end(), [&](const auto &m) { return m.name == name; });
            if (it == models.end()) {
                issues.push_back(Issue{scale_table.source(), row.line, "model_name", "unknown model '" + name + "'"});
            } else if (!value || *value < 0.0) {
                issues.push_back(Issue{scale_table.source(), row.line, "scale", "expected a non-negative number"});
            } else {
                it->residual_scale = *value;
            }
        }
    }

    for (const auto &model : models) {
        try {
            model.validate();
        } catch (const ValidationError &e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return CoefficientTable(std::move(models));
}

bool CoefficientTable::contains(std::string_view name) const {
    return std::any_of(models_.begin(), models_.end(), [&](const auto &m) { return m.name == name; });
}

const CoefficientSet &CoefficientTable::at(std::string_view name) const {
    for (const auto &model : models_) {
        if (model.name == name) {
            return model;
        }
    }
    throw ValidationError("no coefficient set named '" + std::string(name) + "'");
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

namespace {

void require_kind(const CoefficientSet &model, ModelKind kind) {
    if (model.kind != kind) {
        throw DomainError("model " + model.name + " is " + std::string(to_string(model.kind)) + ", expected " +
                          std::string(to_string(kind)));
    }
}

} // namespace

double logit_prob(const CoefficientSet &model, const Covariates &values) {
    require_kind(model, ModelKind::logit);
    return logistic(model.index(values));
}

std::vector<double> multinomial_probs(const CoefficientSet &model, const Covariates &values) {
    require_kind(model, ModelKind::multinomial);
    std::vector<double> z(model.coefficients.size() + 1, 0.0);
    for (std::size_t k = 0; k < model.coefficients.size(); ++k) {
        z[k + 1] = model.index(values, k);
    }
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (auto &v : z) {
        v = std::exp(v - peak);
        total += v;
    }
    for (auto &v : z) {
        v /= total;
    }
    return z;
}

double linear_predict(const CoefficientSet &model, const Covariates &values) {
    require_kind(model, ModelKind::linear);
    return model.index(values);
}

Residual recover_residual(const CoefficientSet &model, const Covariates &values, std::optional<double> observed) {
    if (!observed) {
        throw DomainError("model " + model.name + ": cannot recover a residual without an observed outcome");
    }
    return Residual{*observed - linear_predict(model, values), ResidualProvenance::recovered};
}

Residual draw_residual(const CoefficientSet &model, std::uint64_t seed, PersonId person) {
    if (!(model.residual_scale >= 0.0) || !std::isfinite(model.residual_scale)) {
        throw DomainError("model " + model.name + ": residual scale must be finite and non-negative");
    }
    if (model.residual_scale == 0.0) {
        return Residual{0.0, ResidualProvenance::stochastic};
    }
    KeyedStream stream(seed, person, model.name);
    return Residual{model.residual_scale * stream.normal(), ResidualProvenance::stochastic};
}

void ResidualStore::recover(PersonId person, const CoefficientSet &model, const Covariates &values,
                            double observed) {
    if (!(observed > 0.0)) {
        throw DomainError("model " + model.name + ": recovered residuals need a positive observed outcome");
    }
    residuals_[{person, model.name}] = recover_residual(model, values, observed);
}

void ResidualStore::draw(PersonId person, const CoefficientSet &model, std::uint64_t seed) {
    residuals_[{person, model.name}] = draw_residual(model, seed, person);
}

std::optional<Residual> ResidualStore::find(PersonId person, std::string_view model) const {
    const auto it = residuals_.find(std::pair<PersonId, std::string>{person, std::string(model)});
    if (it == residuals_.end()) {
        return std::nullopt;
    }
    return it->second;
}

AnchoredDraw simulate_binary_anchored(double prob, bool observed, KeyedStream &stream) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw DomainError("anchored draw needs a probability in (0,1), got " + std::to_string(prob));
    }
    const double v = stream.uniform(); // (0,1)
    double u = observed ? v * prob : prob + v * (1.0 - prob);
    // Guard the half-open intervals against rounding at the edges.
    if (observed && u >= prob) {
        u = std::nextafter(prob, 0.0);
    }
    if (!observed && u < prob) {
        u = prob;
    }
    return AnchoredDraw{u};
}

Covariates commute_covariates(const Person &person) {
    Covariates x;
    if (person.industry) {
        switch (*person.industry) {
        case Sector::agriculture_mining:
            break; // reference group
        case Sector::manufacturing:
        case Sector::utilities:
            x["d_ind_manufacturing"] = 1.0;
            break;
        case Sector::construction:
            x["d_ind_construction"] = 1.0;
            break;
        case Sector::wholesale_retail:
        case Sector::accommodation_food:
        case Sector::financial_insurance:
        case Sector::real_estate:
        case Sector::professional_scientific:
        case Sector::administrative_support:
            x["d_ind_commerce"] = 1.0;
            break;
        case Sector::transport_storage:
        case Sector::information_communication:
            x["d_ind_transport_communications"] = 1.0;
            break;
        case Sector::public_administration:
            x["d_ind_public_administration"] = 1.0;
            break;
        case Sector::education:
        case Sector::health_social_work:
            x["d_ind_education_health"] = 1.0;
            break;
        case Sector::arts_entertainment:
        case Sector::other_sectors:
            x["d_ind_other"] = 1.0;
            break;
        }
    }
    if (person.region == Region::border_midland_western) {
        x["d_region_bmw"] = 1.0;
    }
    // Occupation 9 is the omitted reference group.
    if (person.occupation >= 1 && person.occupation <= 8) {
        x["d_occupation_" + std::to_string(person.occupation)] = 1.0;
    }
    static constexpr std::array<std::pair<int, std::string_view>, 12> kAgeBands{{
        {20, "d_age_20_24"}, {25, "d_age_25_29"}, {30, "d_age_30_34"}, {35, "d_age_35_39"},
        {40, "d_age_40_44"}, {45, "d_age_45_49"}, {50, "d_age_50_54"}, {55, "d_age_55_59"},
        {60, "d_age_60_64"}, {65, "d_age_65_69"}, {70, "d_age_70_74"}, {75, "d_age_75_plus"},
    }};
    for (std::size_t i = kAgeBands.size(); i-- > 0;) {
        if (person.age >= kAgeBands[i].first) {
            x[std::string(kAgeBands[i].second)] = 1.0;
            break;
        }
    }
    if (person.education == Education::university) {
        x["d_university"] = 1.0;
    }
    return x;
}

} // namespace nowcast
