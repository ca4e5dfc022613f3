#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "freshcost/evaluation.hpp"
#include "oracles.hpp"

namespace freshcost {
namespace {

const std::vector<std::string> kClasses{"FR", "HF", "SP"};

PredictionRecord rec(std::string id, std::string actual, std::string predicted) {
    return {std::move(id), std::move(actual), std::move(predicted), std::nullopt, std::nullopt};
}

ConfusionMatrix cm3(std::initializer_list<std::initializer_list<std::uint64_t>> counts) {
    ConfusionMatrix cm(kClasses);
    cm.counts = Matrix<std::uint64_t>(counts);
    return cm;
}

TEST(ConfusionFromRecords, Empty) {
    const auto cm = confusion_from_records({}, kClasses);
    EXPECT_EQ(cm.total(), 0u);
    EXPECT_EQ(cm.counts, Matrix<std::uint64_t>(3, 3));
}

TEST(ConfusionFromRecords, Counts) {
    const std::vector<PredictionRecord> records{rec("a", "FR", "FR"), rec("b", "SP", "HF"), rec("c", "SP", "HF")};
    const auto cm = confusion_from_records(records, kClasses);
    EXPECT_EQ(cm.counts, cm3({{1, 0, 0}, {0, 0, 0}, {0, 2, 0}}).counts);
}

TEST(ConfusionFromRecords, UnknownLabelNamesItem) {
    const std::vector<PredictionRecord> records{rec("a", "FR", "FR"), rec("item-42", "XX", "HF")};
    try {
        confusion_from_records(records, kClasses);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("item-42"), std::string::npos);
    }
}

TEST(ConfusionFromRecords, AccuracyOfNinetyThreePercent) {
    // 421 of 452 correct is the nearest integer realization of 93.13%.
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 452; ++i) records.push_back(rec(std::to_string(i), "HF", i < 421 ? "HF" : "SP"));
    const auto cm = confusion_from_records(records, kClasses);
    EXPECT_NEAR(accuracy(cm), 0.9313, 1.0 / 452);
}

TEST(Accuracy, Basic) {
    EXPECT_EQ(accuracy(cm3({{100, 0, 0}, {0, 100, 0}, {0, 0, 100}})), 1.0);
    EXPECT_EQ(accuracy(cm3({{1, 0, 0}, {0, 0, 0}, {0, 1, 0}})), 0.5);
    EXPECT_THROW(accuracy(ConfusionMatrix(kClasses)), DomainError);
}

TEST(MacroScores, PerfectDiagonal) {
    const auto cm = cm3({{3, 0, 0}, {0, 4, 0}, {0, 0, 5}});
    EXPECT_EQ(macro_precision(cm).value, 1.0);
    EXPECT_EQ(macro_recall(cm).value, 1.0);
}

TEST(MacroScores, TwoClassHandExample) {
    ConfusionMatrix cm({"A", "B"});
    cm.counts = {{1, 1}, {0, 2}};
    // Records realizing the same matrix, for the per-class loop oracle.
    const std::vector<PredictionRecord> records{rec("1", "A", "A"), rec("2", "A", "B"), rec("3", "B", "B"),
                                                rec("4", "B", "B")};
    const auto oracle = oracle::per_class_from_records(records, {"A", "B"});
    const double oracle_p = (oracle.precision[0] + oracle.precision[1]) / 2;
    const double oracle_r = (oracle.recall[0] + oracle.recall[1]) / 2;
    EXPECT_NEAR(oracle_p, 0.8333333333, 1e-9);
    EXPECT_NEAR(oracle_r, 0.75, 1e-12);

    const auto p = macro_precision(cm);
    const auto r = macro_recall(cm);
    EXPECT_NEAR(p.value, oracle_p, 1e-12);
    EXPECT_NEAR(r.value, oracle_r, 1e-12);
    EXPECT_NEAR(p.per_class[1], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.per_class[0], 0.5, 1e-12);
}

TEST(MacroScores, ZeroDenominatorIsFlaggedNotFatal) {
    const auto cm = cm3({{2, 0, 0}, {0, 0, 0}, {1, 0, 1}});  // HF never predicted, never actual
    const auto p = macro_precision(cm);
    const auto r = macro_recall(cm);
    EXPECT_TRUE(p.undefined[1]);
    EXPECT_TRUE(r.undefined[1]);
    EXPECT_FALSE(p.undefined[0]);
    EXPECT_NEAR(p.value, (2.0 / 3.0 + 0 + 1.0) / 3, 1e-12);
    EXPECT_NEAR(r.value, (1.0 + 0 + 0.5) / 3, 1e-12);

    const auto report = evaluate(cm, default_assumptions(), "m");
    EXPECT_EQ(report.flags.size(), 2u);
}

TEST(CumulativeMcc, ZeroOffDiagonal) {
    const auto mcc = mcc_matrix(default_assumptions());
    EXPECT_EQ(cumulative_mcc(cm3({{5, 0, 0}, {0, 7, 0}, {0, 0, 9}}), mcc).total, 0.0);
}

TEST(CumulativeMcc, TenSpoiledAsHalfFresh) {
    const auto mcc = mcc_matrix(default_assumptions());
    const auto b = cumulative_mcc(cm3({{0, 0, 0}, {0, 0, 0}, {0, 10, 0}}), mcc);
    EXPECT_NEAR(b.total, 4997.5, 1e-9);
    EXPECT_NEAR(b.contributions(2, 1), 4997.5, 1e-9);
}

TEST(CumulativeMcc, HandSumMatchesElementwiseOracle) {
    const auto a = default_assumptions();
    const auto mcc = mcc_matrix(a);
    const auto cm = cm3({{0, 3, 0}, {0, 0, 2}, {0, 0, 0}});
    double oracle_total = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) oracle_total += cm.counts(i, j) * oracle::regret(a, i, j);
    EXPECT_NEAR(oracle_total, 3 * 4.0 + 2 * 4.5, 1e-9);
    EXPECT_NEAR(cumulative_mcc(cm, mcc).total, 21.0, 1e-9);
}

TEST(CumulativeMcc, DimensionMismatch) {
    ConfusionMatrix two({"A", "B"});
    EXPECT_THROW(cumulative_mcc(two, mcc_matrix(default_assumptions())), ArgumentError);
}

TEST(Evaluate, PerfectPredictions) {
    const auto r = evaluate(cm3({{10, 0, 0}, {0, 10, 0}, {0, 0, 10}}), default_assumptions(), "perfect");
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.cumulative_mcc, 0.0);
    EXPECT_TRUE(check_report_identities(r).empty());
}

TEST(Evaluate, SpoiledAsHalfFreshPlusCorrect) {
    const auto r = evaluate(cm3({{150, 0, 0}, {0, 146, 0}, {0, 10, 146}}), default_assumptions(), "m");
    EXPECT_NEAR(r.accuracy, 442.0 / 452.0, 1e-12);
    EXPECT_NEAR(r.cumulative_mcc, 4997.5, 1e-9);
}

TEST(Evaluate, FromRecordsMatchesFromMatrix) {
    std::vector<PredictionRecord> records{rec("1", "FR", "HF"), rec("2", "SP", "SP"), rec("3", "HF", "FR")};
    const auto a = default_assumptions();
    const auto x = evaluate(records, a, "m");
    const auto y = evaluate(confusion_from_records(records, kClasses), a, "m");
    EXPECT_EQ(x.cumulative_mcc, y.cumulative_mcc);
    EXPECT_EQ(x.accuracy, y.accuracy);
}

TEST(Evaluate, ClassMismatchIsDataError) {
    ConfusionMatrix two({"FR", "SP"});
    two.counts(0, 0) = 1;
    EXPECT_THROW(evaluate(two, default_assumptions(), "m"), DataError);
}

TEST(Evaluate, PermutingRecordsChangesNothing) {
    std::mt19937 rng(11);
    std::vector<PredictionRecord> records;
    std::uniform_int_distribution<int> cls(0, 2);
    for (int i = 0; i < 200; ++i) records.push_back(rec(std::to_string(i), kClasses[cls(rng)], kClasses[cls(rng)]));
    const auto a = default_assumptions();
    const auto base = evaluate(records, a, "m");
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(records.begin(), records.end(), rng);
        const auto r = evaluate(records, a, "m");
        EXPECT_EQ(r.confusion, base.confusion);
        EXPECT_EQ(r.accuracy, base.accuracy);
        EXPECT_EQ(r.macro_precision, base.macro_precision);
        EXPECT_EQ(r.macro_recall, base.macro_recall);
        EXPECT_EQ(r.cumulative_mcc, base.cumulative_mcc);
    }
}

MetricsReport fake(std::string id, double mcc, double acc) {
    MetricsReport r;
    r.model_id = std::move(id);
    r.cumulative_mcc = mcc;
    r.accuracy = acc;
    return r;
}

std::vector<std::string> ids(const std::vector<MetricsReport>& v) {
    std::vector<std::string> out;
    for (const auto& r : v) out.push_back(r.model_id);
    return out;
}

TEST(RankModels, KnownModelOrdering) {
    const auto ranked = rank_models({fake("18-FE", 886, 0.8270), fake("18-FT", 5076, 0.9313), fake("50-FE", 242, 0.8803),
                                     fake("50-FT", 316, 0.8470), fake("UNet", 89411, 0.3525)});
    EXPECT_EQ(ids(ranked), (std::vector<std::string>{"50-FE", "50-FT", "18-FE", "18-FT", "UNet"}));
}

TEST(RankModels, SingleAndTies) {
    EXPECT_EQ(ids(rank_models({fake("only", 1, 0.5)})), std::vector<std::string>{"only"});
    EXPECT_EQ(ids(rank_models({fake("b", 10, 0.8), fake("a", 10, 0.9)})), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(ids(rank_models({fake("z", 10, 0.9), fake("y", 10, 0.9)})), (std::vector<std::string>{"y", "z"}));
    EXPECT_THROW(rank_models({}), ArgumentError);
}

TEST(ReportIdentities, DetectTampering) {
    auto r = evaluate(cm3({{5, 1, 0}, {0, 5, 1}, {0, 2, 5}}), default_assumptions(), "m");
    EXPECT_TRUE(check_report_identities(r).empty());
    r.cumulative_mcc += 1.0;
    EXPECT_FALSE(check_report_identities(r).empty());
}

}  // namespace
}  // namespace freshcost
