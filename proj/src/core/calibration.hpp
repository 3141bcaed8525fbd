#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

/// One candidate of a binary alignment. When `anchor` is set it replaces the
/// keyed uniform in the score, so units whose observed state is encoded in
/// the anchor keep that state whenever the target equals the observed count.
struct BinaryUnit {
    std::int64_t id = 0;
    double prob = 0.5;
    double weight = 1.0;
    std::optional<double> anchor;
};

/// Selects units so their total weight first reaches `target`.
///
/// Units are ranked by logit(prob) - logit(u) descending (ties by ascending
/// id), where u is the anchor or a uniform keyed by (seed, id, key). The
/// realized weight lies in [target, target + max weight). Returns selected
/// ids in ascending order. Throws InfeasibleError when target exceeds the
/// total weight and DomainError for probabilities outside (0,1).
std::vector<std::int64_t> align_binary(const std::vector<BinaryUnit> &units, double target, std::uint64_t seed,
                                       std::string_view key);

struct MultinomialUnit {
    std::int64_t id = 0;
    std::vector<double> probs;
    double weight = 1.0;
};

/// Assigns every unit one outcome index so per-outcome weights track
/// `targets`. Outcomes are filled by sequential binary alignment on the
/// remaining units, largest target first; each step aims at the cumulative
/// target so rounding does not accumulate. The last outcome takes the rest.
/// Result is parallel to `units`.
std::vector<std::size_t> align_multinomial(const std::vector<MultinomialUnit> &units,
                                           const std::vector<double> &targets, std::uint64_t seed,
                                           std::string_view key);

struct ContinuousUnit {
    std::int64_t id = 0;
    double value = 0.0;
    double weight = 1.0;
};

/// Factor that moves the weighted mean of `units` to `target_mean`.
/// Throws DomainError when the current mean is 0 and the target is not.
double continuous_factor(const std::vector<ContinuousUnit> &units, double target_mean);
/// Values multiplied by continuous_factor, parallel to `units`.
std::vector<double> align_continuous(const std::vector<ContinuousUnit> &units, double target_mean);

/// Dense row-major matrix with optional labels.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cells;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), cells(r * c, fill) {}

    double &at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

struct IpfOptions {
    double tol = 1e-8;
    int max_iter = 1000;
};

struct IpfResult {
    Matrix fitted;
    int iterations = 0;
    double deviation = 0.0; // max absolute marginal deviation at exit
};

/// Iterative proportional fitting: rows then columns are rescaled to their
/// targets until every marginal is within `tol`. A seed that already fits is
/// returned unchanged. Throws ValidationError for negative cells or shape
/// mismatch and InfeasibleError when the target totals disagree (relative
/// 1e-9), when a positive target has an all-zero seed line, or when
/// max_iter passes do not converge (the message carries the deviation).
IpfResult ipf(const Matrix &seed, const std::vector<double> &row_targets, const std::vector<double> &col_targets,
              const IpfOptions &options = {});

struct LabeledTargets {
    std::vector<std::string> labels;
    std::vector<double> values;
};

/// Seed matrix file: header "label,<col>,<col>..." then one row per label.
Matrix load_seed_matrix(const std::filesystem::path &path);
/// Target file with columns label,target.
LabeledTargets load_targets(const std::filesystem::path &path);
/// Matrix rendered as a CSV with labels.
std::string matrix_csv(const Matrix &matrix);

} // namespace nowcast
