#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freshcost/cost_model.hpp"
#include "freshcost/matrix.hpp"

namespace freshcost {

struct PredictionRecord {
    std::string item_id;
    std::string actual;
    std::string predicted;
    std::optional<std::vector<double>> probabilities;
    std::optional<std::string> model_id;

    bool operator==(const PredictionRecord&) const = default;
};

// One classifier's outputs for a batch. `classes` is empty when the source
// carried no header.
struct PredictionSet {
    std::string model_id;
    std::vector<std::string> classes;
    std::vector<PredictionRecord> records;
};

struct ConfusionMatrix {
    std::vector<std::string> labels;
    Matrix<std::uint64_t> counts;  // actual rows x predicted columns

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<std::string> class_labels);

    std::size_t size() const noexcept { return labels.size(); }
    std::uint64_t total() const;
    std::uint64_t trace() const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix&) const = default;
};

// Throws DataError naming the item_id of the first record with an unknown label.
ConfusionMatrix confusion_from_records(std::span<const PredictionRecord> records,
                                       std::span<const std::string> classes);

double accuracy(const ConfusionMatrix& cm);

struct MacroScore {
    double value = 0.0;
    std::vector<double> per_class;
    std::vector<bool> undefined;  // zero denominator; contributes 0 to `value`
};

MacroScore macro_precision(const ConfusionMatrix& cm);
MacroScore macro_recall(const ConfusionMatrix& cm);

struct MccBreakdown {
    double total = 0.0;
    Matrix<double> contributions;  // counts[i][j] * mcc[i][j]
};

MccBreakdown cumulative_mcc(const ConfusionMatrix& cm, const MccMatrix& mcc);

struct MetricsReport {
    std::string model_id;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    double cumulative_mcc = 0.0;
    Matrix<double> per_cell_mcc_contributions;
    ConfusionMatrix confusion;
    MccMatrix mcc;
    std::vector<std::string> flags;  // e.g. "precision undefined for class HF"
};

MetricsReport evaluate(const ConfusionMatrix& cm, const BusinessAssumptions& assumptions,
                       std::string model_id);
MetricsReport evaluate(std::span<const PredictionRecord> records,
                       const BusinessAssumptions& assumptions, std::string model_id);

// Re-derives accuracy, contributions and the cumulative total from the
// report's own confusion and MCC matrices. Returns the mismatches found.
std::vector<std::string> check_report_identities(const MetricsReport& report);

// Ascending cumulative MCC, then descending accuracy, then model_id.
std::vector<MetricsReport> rank_models(std::vector<MetricsReport> reports);

}  // namespace freshcost
