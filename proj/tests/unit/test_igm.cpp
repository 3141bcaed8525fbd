#include "core/error.hpp"
#include "core/igm.hpp"
#include "support/paths.hpp"

#include <doctest.h>

#include <cmath>

using namespace nowcast;

namespace {

const CoefficientTable &shipped() {
    static const CoefficientTable table =
        CoefficientTable::load(testing::data_dir() / "coefficients.csv", testing::data_dir() / "residual_scales.csv");
    return table;
}

CoefficientSet linear_model(double scale = 0.0) {
    CoefficientSet m;
    m.name = "toy";
    m.kind = ModelKind::linear;
    m.covariates = {"x", "d_flag"};
    m.outcomes = {"y"};
    m.coefficients = {{2.0, 5.0}};
    m.intercepts = {10.0};
    m.residual_scale = scale;
    return m;
}

} // namespace

TEST_CASE("public transport probability of the reference worker") {
    const auto &model = shipped().at("public_transport");
    CHECK(logit_prob(model, {}) == doctest::Approx(0.0552527).epsilon(1e-6));
    CHECK(logit_prob(model, {{"d_region_bmw", 1.0}}) == doctest::Approx(0.0134399).epsilon(1e-6));
}

TEST_CASE("zero coefficients give one half") {
    CoefficientSet m;
    m.name = "flat";
    m.kind = ModelKind::logit;
    m.covariates = {"d_a"};
    m.outcomes = {"yes"};
    m.coefficients = {{0.0}};
    m.intercepts = {0.0};
    CHECK(logit_prob(m, {{"d_a", 1.0}}) == 0.5);
}

TEST_CASE("unknown and missing covariates are errors") {
    const auto m = linear_model();
    CHECK_THROWS_AS(linear_predict(m, {{"x", 1.0}, {"z", 1.0}}), DomainError);
    CHECK_THROWS_AS(linear_predict(m, {{"d_flag", 1.0}}), DomainError);
    CHECK(linear_predict(m, {{"x", 1.0}}) == 12.0);
    CHECK_THROWS_AS(logit_prob(m, {{"x", 1.0}}), DomainError);
}

TEST_CASE("multinomial probabilities are a softmax against the reference") {
    CoefficientSet m;
    m.name = "three";
    m.kind = ModelKind::multinomial;
    m.covariates = {};
    m.outcomes = {"b", "c"};
    m.coefficients = {{}, {}};
    m.intercepts = {0.0, 0.0};
    auto p = multinomial_probs(m, {});
    REQUIRE(p.size() == 3);
    for (double v : p) {
        CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }

    m.intercepts = {std::log(2.0), std::log(3.0)};
    p = multinomial_probs(m, {});
    CHECK(p[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-14));

    CoefficientSet two = m;
    two.outcomes = {"b"};
    two.coefficients = {{}};
    two.intercepts = {0.7};
    CoefficientSet logit = two;
    logit.kind = ModelKind::logit;
    CHECK(multinomial_probs(two, {})[1] == doctest::Approx(logit_prob(logit, {})).epsilon(1e-15));
}

TEST_CASE("childcare expenditure of a two-earner family with a preschool child") {
    const auto &model = shipped().at("childcare_expenditure");
    const Covariates x{{"n_children_0_4", 1.0},
                       {"n_children", 1.0},
                       {"eq_disposable_income", 0.0},
                       {"d_two_earners_or_lone_parent_working", 1.0}};
    CHECK(linear_predict(model, x) == doctest::Approx(66.5).epsilon(1e-12));
}

TEST_CASE("linear prediction is linear") {
    const auto m = linear_model();
    CHECK(linear_predict(m, {{"x", 0.0}}) == 10.0);
    CHECK(linear_predict(m, {{"x", 2.0}}) - linear_predict(m, {{"x", 1.0}}) == 2.0);
}

TEST_CASE("residuals are recovered so the observation is reproduced") {
    const auto m = linear_model();
    // Prediction at x = 35 is 80.
    const Covariates x{{"x", 35.0}};
    const auto r = recover_residual(m, x, 100.0);
    CHECK(r.value == 20.0);
    CHECK(r.provenance == ResidualProvenance::recovered);
    CHECK(linear_predict(m, x) + r.value == 100.0);
    CHECK(recover_residual(m, x, 80.0).value == 0.0);
    CHECK_THROWS_AS(recover_residual(m, x, std::nullopt), DomainError);
}

TEST_CASE("drawn residuals follow the configured scale") {
    CHECK(draw_residual(linear_model(0.0), 1, 5).value == 0.0);
    CHECK_THROWS_AS(draw_residual(linear_model(-1.0), 1, 5), DomainError);

    const auto m = linear_model(1.0);
    CHECK(draw_residual(m, 9, 5).value == draw_residual(m, 9, 5).value);
    CHECK(draw_residual(m, 9, 5).provenance == ResidualProvenance::stochastic);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = draw_residual(m, 2020, i).value;
        sum += e;
        sq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(sd - 1.0) < 0.02);
}

TEST_CASE("the residual store keeps recovered residuals for positive outcomes only") {
    ResidualStore store;
    const auto m = linear_model(0.5);
    store.recover(1, m, {{"x", 0.0}}, 15.0);
    CHECK_THROWS_AS(store.recover(2, m, {{"x", 0.0}}, 0.0), DomainError);
    store.draw(3, m, 11);
    CHECK(store.size() == 2);
    CHECK(store.find(1, "toy")->value == 5.0);
    CHECK(store.find(3, "toy")->provenance == ResidualProvenance::stochastic);
    CHECK_FALSE(store.find(2, "toy"));
}

TEST_CASE("anchored draws replay the observation") {
    KeyedStream stream(1, 1, "anchor");
    for (int i = 0; i < 1000; ++i) {
        const auto yes = simulate_binary_anchored(0.5, true, stream);
        CHECK(yes.u >= 0.0);
        CHECK(yes.u < 0.5);
        const auto no = simulate_binary_anchored(0.5, false, stream);
        CHECK(no.u >= 0.5);
        CHECK(no.outcome(1.0));
    }
    CHECK_THROWS_AS(simulate_binary_anchored(0.0, true, stream), DomainError);
    CHECK_THROWS_AS(simulate_binary_anchored(1.0, true, stream), DomainError);
}

TEST_CASE("coefficient sets are validated") {
    auto m = linear_model();
    m.coefficients = {{1.0}};
    CHECK_THROWS_AS(m.validate(), ValidationError);
    CoefficientSet multi;
    multi.name = "m";
    multi.kind = ModelKind::multinomial;
    CHECK_THROWS_AS(multi.validate(), ValidationError);
    CHECK_THROWS_AS(shipped().at("no_such_model"), ValidationError);
}

TEST_CASE("commute covariates encode the worker's groups") {
    Person p;
    p.work_status = WorkStatus::employee;
    p.industry = Sector::construction;
    p.region = Region::border_midland_western;
    p.occupation = 9;
    p.age = 40;
    p.education = Education::university;
    const auto x = commute_covariates(p);
    CHECK(x.at("d_ind_construction") == 1.0);
    CHECK(x.at("d_region_bmw") == 1.0);
    CHECK(x.at("d_university") == 1.0);
    CHECK(x.at("d_age_40_44") == 1.0);
    CHECK_FALSE(x.contains("d_occupation_9"));
    CHECK_NOTHROW(logit_prob(shipped().at("public_transport"), x));
    CHECK_NOTHROW(logit_prob(shipped().at("private_transport"), x));
}
