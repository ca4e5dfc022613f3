#include "freshcost/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace freshcost {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_labels)
    : labels(std::move(class_labels)), counts(labels.size(), labels.size(), 0) {}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts.data()) sum += c;
    return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < size(); ++i) sum += counts(i, i);
    return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.labels != labels) throw ArgumentError("confusion matrices have different classes");
    auto dst = counts.data();
    auto src = other.counts.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return *this;
}

ConfusionMatrix confusion_from_records(std::span<const PredictionRecord> records,
                                       std::span<const std::string> classes) {
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(classes[i], i);

    ConfusionMatrix cm({classes.begin(), classes.end()});
    for (const auto& r : records) {
        auto a = index.find(r.actual);
        if (a == index.end())
            throw DataError(fmt::format("item '{}': unknown actual label '{}'", r.item_id, r.actual));
        auto p = index.find(r.predicted);
        if (p == index.end())
            throw DataError(
                fmt::format("item '{}': unknown predicted label '{}'", r.item_id, r.predicted));
        ++cm.counts(a->second, p->second);
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw DomainError("accuracy of an empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

namespace {

// Column sums for precision, row sums for recall.
MacroScore macro_score(const ConfusionMatrix& cm, bool by_column) {
    if (cm.total() == 0) throw DomainError("macro average of an empty confusion matrix");
    const std::size_t k = cm.size();
    MacroScore out{0.0, std::vector<double>(k, 0.0), std::vector<bool>(k, false)};
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t denom = 0;
        for (std::size_t o = 0; o < k; ++o) denom += by_column ? cm.counts(o, c) : cm.counts(c, o);
        if (denom == 0) {
            out.undefined[c] = true;
            continue;
        }
        out.per_class[c] = static_cast<double>(cm.counts(c, c)) / static_cast<double>(denom);
    }
    double sum = 0.0;
    for (double v : out.per_class) sum += v;
    out.value = k ? sum / static_cast<double>(k) : 0.0;
    return out;
}

}  // namespace

MacroScore macro_precision(const ConfusionMatrix& cm) { return macro_score(cm, true); }
MacroScore macro_recall(const ConfusionMatrix& cm) { return macro_score(cm, false); }

MccBreakdown cumulative_mcc(const ConfusionMatrix& cm, const MccMatrix& mcc) {
    const std::size_t k = cm.size();
    if (mcc.values.rows() != k || mcc.values.cols() != k)
        throw ArgumentError(fmt::format("confusion matrix is {}x{} but MCC matrix is {}x{}", k, k,
                                        mcc.values.rows(), mcc.values.cols()));
    MccBreakdown out{0.0, Matrix<double>(k, k)};
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double v = static_cast<double>(cm.counts(i, j)) * mcc.values(i, j);
            out.contributions(i, j) = v;
            out.total += v;
        }
    }
    return out;
}

std::vector<std::string> check_report_identities(const MetricsReport& r) {
    std::vector<std::string> problems;
    const std::size_t k = r.confusion.size();
    if (r.mcc.values.rows() != k || r.per_cell_mcc_contributions.rows() != k) {
        problems.push_back("matrix dimensions disagree");
        return problems;
    }
    const auto total = r.confusion.total();
    if (total > 0 &&
        std::abs(r.accuracy * static_cast<double>(total) - static_cast<double>(r.confusion.trace())) >
            1e-6)
        problems.push_back("accuracy * total != trace");
    for (double v : {r.accuracy, r.macro_precision, r.macro_recall})
        if (!(v >= 0.0 && v <= 1.0)) problems.push_back(fmt::format("fraction {} outside [0, 1]", v));

    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double expect = static_cast<double>(r.confusion.counts(i, j)) * r.mcc.values(i, j);
            const double have = r.per_cell_mcc_contributions(i, j);
            if (std::abs(expect - have) > 1e-9 * std::max(1.0, std::abs(expect)))
                problems.push_back(fmt::format("contribution [{}][{}] = {} but count * mcc = {}", i, j,
                                               have, expect));
            sum += have;
        }
    }
    if (std::abs(sum - r.cumulative_mcc) > 1e-9 * std::max(1.0, std::abs(sum)))
        problems.push_back(
            fmt::format("cumulative_mcc {} != sum of contributions {}", r.cumulative_mcc, sum));
    return problems;
}

MetricsReport evaluate(const ConfusionMatrix& cm, const BusinessAssumptions& assumptions,
                       std::string model_id) {
    auto mcc = mcc_matrix(assumptions);
    if (cm.labels != mcc.labels)
        throw DataError(fmt::format("model '{}': prediction classes [{}] do not match assumption "
                                    "classes [{}]",
                                    model_id, fmt::join(cm.labels, ","), fmt::join(mcc.labels, ",")));

    MetricsReport r;
    r.model_id = std::move(model_id);
    r.accuracy = accuracy(cm);
    auto precision = macro_precision(cm);
    auto recall = macro_recall(cm);
    r.macro_precision = precision.value;
    r.macro_recall = recall.value;
    for (std::size_t c = 0; c < cm.size(); ++c) {
        if (precision.undefined[c])
            r.flags.push_back(fmt::format("precision undefined for class {} (no predictions)", cm.labels[c]));
        if (recall.undefined[c])
            r.flags.push_back(fmt::format("recall undefined for class {} (no actual items)", cm.labels[c]));
    }
    r.per_class_precision = std::move(precision.per_class);
    r.per_class_recall = std::move(recall.per_class);
    auto breakdown = cumulative_mcc(cm, mcc);
    r.cumulative_mcc = breakdown.total;
    r.per_cell_mcc_contributions = std::move(breakdown.contributions);
    r.confusion = cm;
    r.mcc = std::move(mcc);

    if (auto problems = check_report_identities(r); !problems.empty())
        throw DataError(fmt::format("report for '{}' is inconsistent: {}", r.model_id,
                                    fmt::join(problems, "; ")));
    return r;
}

MetricsReport evaluate(std::span<const PredictionRecord> records,
                       const BusinessAssumptions& assumptions, std::string model_id) {
    const auto classes = assumptions.class_names();
    return evaluate(confusion_from_records(records, classes), assumptions, std::move(model_id));
}

std::vector<MetricsReport> rank_models(std::vector<MetricsReport> reports) {
    if (reports.empty()) throw ArgumentError("rank_models needs at least one report");
    std::stable_sort(reports.begin(), reports.end(), [](const auto& x, const auto& y) {
        if (x.cumulative_mcc != y.cumulative_mcc) return x.cumulative_mcc < y.cumulative_mcc;
        if (x.accuracy != y.accuracy) return x.accuracy > y.accuracy;
        return x.model_id < y.model_id;
    });
    return reports;
}

}  // namespace freshcost
