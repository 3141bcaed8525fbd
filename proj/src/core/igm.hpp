#pragma once

#include "core/population.hpp"
#include "core/rng.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

enum class ModelKind { logit, multinomial, linear };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

/// Named covariate values for one unit.
using Covariates = std::map<std::string, double, std::less<>>;

/// Covariates whose name starts with "d_" are dummy-coded: an absent dummy
/// reads as 0. Any other covariate must be supplied explicitly.
bool is_dummy_covariate(std::string_view name);

/// One regression equation of the income-generation model.
///
/// For logit and linear models there is a single coefficient row. A
/// multinomial model has one row per non-reference outcome; the reference
/// outcome has index 0 and an implicit index of 0.
struct CoefficientSet {
    std::string name;
    ModelKind kind = ModelKind::logit;
    std::vector<std::string> covariates;
    std::vector<std::string> outcomes; // labels of the coefficient rows
    std::vector<std::vector<double>> coefficients;
    std::vector<double> intercepts;
    /// Standard deviation of the normal disturbance; 0 disables it.
    double residual_scale = 0.0;

    /// Throws ValidationError when the shape invariants do not hold.
    void validate() const;
    /// intercept + sum(beta * x) for coefficient row `row`.
    double index(const Covariates &values, std::size_t row = 0) const;
};

class CoefficientTable {
  public:
    CoefficientTable() = default;
    explicit CoefficientTable(std::vector<CoefficientSet> models);

    /// Reads the long-form coefficient file (model_name, kind, outcome,
    /// covariate, value; intercepts use covariate "_constant"). When
    /// `scales` is given it is read as (model_name, scale) rows.
    static CoefficientTable load(const std::filesystem::path &coefficients,
                                 const std::optional<std::filesystem::path> &scales = std::nullopt);

    bool contains(std::string_view name) const;
    const CoefficientSet &at(std::string_view name) const;
    const std::vector<CoefficientSet> &models() const noexcept { return models_; }

  private:
    std::vector<CoefficientSet> models_;
};

double logistic(double x);
double logit(double p);

double logit_prob(const CoefficientSet &model, const Covariates &values);
/// Softmax over {0} and the non-reference indices; element 0 is the
/// reference outcome.
std::vector<double> multinomial_probs(const CoefficientSet &model, const Covariates &values);
double linear_predict(const CoefficientSet &model, const Covariates &values);

enum class ResidualProvenance { recovered, stochastic };

struct Residual {
    double value = 0.0;
    ResidualProvenance provenance = ResidualProvenance::stochastic;
};

/// observed - prediction, so that prediction + residual reproduces the
/// observation. Throws DomainError when nothing was observed.
Residual recover_residual(const CoefficientSet &model, const Covariates &values, std::optional<double> observed);
/// Normal draw with the model's residual scale, keyed by (seed, person, model).
Residual draw_residual(const CoefficientSet &model, std::uint64_t seed, PersonId person);

/// Per-person, per-model residuals.
class ResidualStore {
  public:
    /// Records a recovered residual; `observed` must be a positive outcome.
    void recover(PersonId person, const CoefficientSet &model, const Covariates &values, double observed);
    void draw(PersonId person, const CoefficientSet &model, std::uint64_t seed);
    std::optional<Residual> find(PersonId person, std::string_view model) const;
    std::size_t size() const noexcept { return residuals_.size(); }

  private:
    std::map<std::pair<PersonId, std::string>, Residual, std::less<>> residuals_;
};

/// A uniform number consistent with an observed binary outcome.
struct AnchoredDraw {
    double u = 0.0;

    bool outcome(double prob) const { return u < prob; }
};

/// Draws u on [0, prob) when `observed` holds and on [prob, 1) otherwise, so
/// the rule u < prob replays the observation and a counterfactual
/// probability only flips the outcome when it crosses u.
AnchoredDraw simulate_binary_anchored(double prob, bool observed, KeyedStream &stream);

/// Covariates of the transport-mode equations for a worker: sector group,
/// region, occupation, age band and university dummies.
Covariates commute_covariates(const Person &person);

} // namespace nowcast
