#include "core/calibration.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace nowcast {

namespace {

constexpr double kWeightEps = 1e-9;

double logit_of(double p) { return std::log(p / (1.0 - p)); }

double total_weight(const std::vector<BinaryUnit> &units) {
    double sum = 0.0;
    for (const auto &u : units) {
        sum += u.weight;
    }
    return sum;
}

void check_ids_unique(const std::vector<std::int64_t> &ids) {
    std::vector<std::int64_t> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
        throw DomainError("alignment units share id " + std::to_string(*dup));
    }
}

} // namespace

std::vector<std::int64_t> align_binary(const std::vector<BinaryUnit> &units, double target, std::uint64_t seed,
                                       std::string_view key) {
    if (!(target >= 0.0) || !std::isfinite(target)) {
        throw DomainError("alignment target must be finite and non-negative");
    }
    if (target == 0.0) {
        return {};
    }
    if (units.empty()) {
        throw InfeasibleError("alignment target " + std::to_string(target) + " with no candidate units");
    }
    const double total = total_weight(units);
    if (target > total * (1.0 + 1e-12) + kWeightEps) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "alignment target %.6f exceeds total candidate weight %.6f", target, total);
        throw InfeasibleError(buf);
    }

    struct Scored {
        double q;
        std::int64_t id;
        double weight;
    };
    std::vector<Scored> scored;
    scored.reserve(units.size());
    std::vector<std::int64_t> ids;
    ids.reserve(units.size());
    for (const auto &unit : units) {
        if (!(unit.prob > 0.0 && unit.prob < 1.0)) {
            throw DomainError("alignment probability outside (0,1) for unit " + std::to_string(unit.id));
        }
        if (!(unit.weight > 0.0) || !std::isfinite(unit.weight)) {
            throw DomainError("alignment weight must be positive for unit " + std::to_string(unit.id));
        }
        const double u = unit.anchor ? *unit.anchor : keyed_uniform(seed, unit.id, key);
        if (!(u > 0.0 && u < 1.0)) {
            throw DomainError("alignment anchor outside (0,1) for unit " + std::to_string(unit.id));
        }
        scored.push_back(Scored{logit_of(unit.prob) - logit_of(u), unit.id, unit.weight});
        ids.push_back(unit.id);
    }
    check_ids_unique(ids);
    std::sort(scored.begin(), scored.end(), [](const Scored &a, const Scored &b) {
        if (a.q != b.q) {
            return a.q > b.q;
        }
        return a.id < b.id;
    });

    std::vector<std::int64_t> selected;
    double cumulative = 0.0;
    for (const auto &s : scored) {
        if (cumulative >= target - kWeightEps) {
            break;
        }
        selected.push_back(s.id);
        cumulative += s.weight;
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

std::vector<std::size_t> align_multinomial(const std::vector<MultinomialUnit> &units,
                                           const std::vector<double> &targets, std::uint64_t seed,
                                           std::string_view key) {
    const std::size_t m = targets.size();
    if (m < 2) {
        throw DomainError("multinomial alignment needs at least two outcomes");
    }
    double total = 0.0;
    double max_weight = 0.0;
    for (const auto &unit : units) {
        if (unit.probs.size() != m) {
            throw DomainError("unit " + std::to_string(unit.id) + " has " + std::to_string(unit.probs.size()) +
                              " probabilities for " + std::to_string(m) + " outcomes");
        }
        if (!(unit.weight > 0.0)) {
            throw DomainError("alignment weight must be positive for unit " + std::to_string(unit.id));
        }
        const double sum = std::accumulate(unit.probs.begin(), unit.probs.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-9 ||
            std::any_of(unit.probs.begin(), unit.probs.end(), [](double p) { return !(p >= 0.0); })) {
            throw DomainError("probability vector of unit " + std::to_string(unit.id) + " is not a distribution");
        }
        total += unit.weight;
        max_weight = std::max(max_weight, unit.weight);
    }
    double target_total = 0.0;
    for (const double t : targets) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw DomainError("multinomial targets must be finite and non-negative");
        }
        target_total += t;
    }
    if (std::abs(target_total - total) > max_weight + kWeightEps) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "multinomial targets sum to %.6f but units weigh %.6f", target_total, total);
        throw InfeasibleError(buf);
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return targets[a] > targets[b]; });

    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    std::vector<std::size_t> assignment(units.size(), kUnassigned);
    double cumulative_target = 0.0;
    double cumulative_realized = 0.0;
    for (std::size_t step = 0; step + 1 < m; ++step) {
        const std::size_t outcome = order[step];
        cumulative_target += targets[outcome];
        std::vector<BinaryUnit> candidates;
        std::vector<std::size_t> positions;
        double remaining = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (assignment[i] != kUnassigned) {
                continue;
            }
            double open_mass = 0.0;
            for (std::size_t s = step; s < m; ++s) {
                open_mass += units[i].probs[order[s]];
            }
            double p = open_mass > 0.0 ? units[i].probs[outcome] / open_mass : 0.0;
            p = std::clamp(p, 1e-12, 1.0 - 1e-12);
            candidates.push_back(BinaryUnit{units[i].id, p, units[i].weight, std::nullopt});
            positions.push_back(i);
            remaining += units[i].weight;
        }
        const double step_target = std::clamp(cumulative_target - cumulative_realized, 0.0, remaining);
        const std::string step_key = std::string(key) + ":" + std::to_string(outcome);
        const auto chosen = align_binary(candidates, step_target, seed, step_key);
        std::size_t c = 0;
        for (std::size_t j = 0; j < candidates.size() && c < chosen.size(); ++j) {
            if (std::binary_search(chosen.begin(), chosen.end(), candidates[j].id)) {
                assignment[positions[j]] = outcome;
                cumulative_realized += candidates[j].weight;
                ++c;
            }
        }
    }
    for (auto &a : assignment) {
        if (a == kUnassigned) {
            a = order[m - 1];
        }
    }
    return assignment;
}

double continuous_factor(const std::vector<ContinuousUnit> &units, double target_mean) {
    if (!std::isfinite(target_mean)) {
        throw DomainError("continuous alignment target must be finite");
    }
    double weighted = 0.0;
    double total = 0.0;
    for (const auto &unit : units) {
        if (!(unit.weight > 0.0)) {
            throw DomainError("alignment weight must be positive for unit " + std::to_string(unit.id));
        }
        weighted += unit.weight * unit.value;
        total += unit.weight;
    }
    const double mean = total > 0.0 ? weighted / total : 0.0;
    if (mean == 0.0) {
        if (target_mean == 0.0) {
            return 1.0;
        }
        throw DomainError("cannot scale values with zero weighted mean to a nonzero target");
    }
    return target_mean / mean;
}

std::vector<double> align_continuous(const std::vector<ContinuousUnit> &units, double target_mean) {
    const double factor = continuous_factor(units, target_mean);
    std::vector<double> out;
    out.reserve(units.size());
    for (const auto &unit : units) {
        out.push_back(unit.value * factor);
    }
    return out;
}

std::vector<double> Matrix::row_sums() const {
    std::vector<double> sums(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            sums[r] += at(r, c);
        }
    }
    return sums;
}

std::vector<double> Matrix::col_sums() const {
    std::vector<double> sums(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            sums[c] += at(r, c);
        }
    }
    return sums;
}

namespace {

double max_deviation(const Matrix &m, const std::vector<double> &row_targets, const std::vector<double> &col_targets) {
    double dev = 0.0;
    const auto rs = m.row_sums();
    const auto cs = m.col_sums();
    for (std::size_t r = 0; r < m.rows; ++r) {
        dev = std::max(dev, std::abs(rs[r] - row_targets[r]));
    }
    for (std::size_t c = 0; c < m.cols; ++c) {
        dev = std::max(dev, std::abs(cs[c] - col_targets[c]));
    }
    return dev;
}

} // namespace

IpfResult ipf(const Matrix &seed, const std::vector<double> &row_targets, const std::vector<double> &col_targets,
              const IpfOptions &options) {
    std::vector<Issue> issues;
    if (seed.cells.size() != seed.rows * seed.cols) {
        issues.push_back(Issue{"ipf", 0, "", "seed matrix storage does not match its shape"});
    }
    if (row_targets.size() != seed.rows) {
        issues.push_back(Issue{"ipf", 0, "", "expected " + std::to_string(seed.rows) + " row targets, got " +
                                                  std::to_string(row_targets.size())});
    }
    if (col_targets.size() != seed.cols) {
        issues.push_back(Issue{"ipf", 0, "", "expected " + std::to_string(seed.cols) + " column targets, got " +
                                                  std::to_string(col_targets.size())});
    }
    for (const double v : seed.cells) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            issues.push_back(Issue{"ipf", 0, "", "seed cells must be finite and non-negative"});
            break;
        }
    }
    for (const auto *targets : {&row_targets, &col_targets}) {
        for (const double t : *targets) {
            if (!(t >= 0.0) || !std::isfinite(t)) {
                issues.push_back(Issue{"ipf", 0, "", "targets must be finite and non-negative"});
                break;
            }
        }
    }
    if (!(options.tol > 0.0) || options.max_iter < 0) {
        issues.push_back(Issue{"ipf", 0, "", "tolerance must be positive and max_iter non-negative"});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }

    const double row_total = std::accumulate(row_targets.begin(), row_targets.end(), 0.0);
    const double col_total = std::accumulate(col_targets.begin(), col_targets.end(), 0.0);
    if (std::abs(row_total - col_total) > 1e-9 * std::max({std::abs(row_total), std::abs(col_total), 1e-300})) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "row targets sum to %.12g but column targets sum to %.12g", row_total,
                      col_total);
        throw InfeasibleError(buf);
    }
    const auto seed_rows = seed.row_sums();
    const auto seed_cols = seed.col_sums();
    for (std::size_t r = 0; r < seed.rows; ++r) {
        if (row_targets[r] > 0.0 && seed_rows[r] == 0.0) {
            throw InfeasibleError("row " + std::to_string(r) + " has a positive target but an all-zero seed");
        }
    }
    for (std::size_t c = 0; c < seed.cols; ++c) {
        if (col_targets[c] > 0.0 && seed_cols[c] == 0.0) {
            throw InfeasibleError("column " + std::to_string(c) + " has a positive target but an all-zero seed");
        }
    }

    IpfResult result{seed, 0, max_deviation(seed, row_targets, col_targets)};
    Matrix &m = result.fitted;
    while (result.deviation >= options.tol) {
        if (result.iterations >= options.max_iter) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "ipf did not converge after %d iterations (max marginal deviation %.3g)",
                          options.max_iter, result.deviation);
            throw InfeasibleError(buf);
        }
        const auto rs = m.row_sums();
        for (std::size_t r = 0; r < m.rows; ++r) {
            const double f = rs[r] > 0.0 ? row_targets[r] / rs[r] : 0.0;
            for (std::size_t c = 0; c < m.cols; ++c) {
                m.at(r, c) *= f;
            }
        }
        const auto cs = m.col_sums();
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double f = cs[c] > 0.0 ? col_targets[c] / cs[c] : 0.0;
            for (std::size_t r = 0; r < m.rows; ++r) {
                m.at(r, c) *= f;
            }
        }
        ++result.iterations;
        result.deviation = max_deviation(m, row_targets, col_targets);
    }
    return result;
}

Matrix load_seed_matrix(const std::filesystem::path &path) {
    const auto table = DelimitedTable::read(path);
    if (table.header().size() < 2) {
        throw ValidationError(std::vector<Issue>{Issue{table.source(), 1, "", "expected a label column and at least one value column"}});
    }
    Matrix m(table.rows().size(), table.header().size() - 1);
    m.col_labels.assign(table.header().begin() + 1, table.header().end());
    std::vector<Issue> issues;
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        const auto &row = table.rows()[r];
        m.row_labels.push_back(row.fields[0]);
        for (std::size_t c = 1; c < row.fields.size(); ++c) {
            const auto value = parse_double(row.fields[c]);
            if (!value || *value < 0.0) {
                issues.push_back(Issue{table.source(), row.line, table.header()[c], "expected a non-negative number"});
                continue;
            }
            m.at(r, c - 1) = *value;
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return m;
}

LabeledTargets load_targets(const std::filesystem::path &path) {
    const auto table = DelimitedTable::read(path);
    table.require_columns({"label", "target"});
    LabeledTargets out;
    std::vector<Issue> issues;
    for (const auto &row : table.rows()) {
        const auto value = parse_double(table.field(row, "target"));
        if (!value || *value < 0.0) {
            issues.push_back(Issue{table.source(), row.line, "target", "expected a non-negative number"});
            continue;
        }
        out.labels.push_back(table.field(row, "label"));
        out.values.push_back(*value);
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return out;
}

std::string matrix_csv(const Matrix &matrix) {
    std::string out = "label";
    for (std::size_t c = 0; c < matrix.cols; ++c) {
        out += ',';
        out += c < matrix.col_labels.size() ? matrix.col_labels[c] : std::to_string(c);
    }
    out += '\n';
    char buf[40];
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        out += r < matrix.row_labels.size() ? matrix.row_labels[r] : std::to_string(r);
        for (std::size_t c = 0; c < matrix.cols; ++c) {
            std::snprintf(buf, sizeof buf, ",%.10g", matrix.at(r, c));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace nowcast
