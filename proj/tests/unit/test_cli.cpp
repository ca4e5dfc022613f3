#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

#include "cli.hpp"
#include "freshcost/prediction_io.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;

namespace freshcost {
namespace {

using testing::TempDir;

const fs::path kData = FRESHCOST_DATA_DIR;
const fs::path kFixtures = FRESHCOST_FIXTURE_DIR;
const std::string kDefaults = (kData / "default_assumptions.json").string();

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "freshcost");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string stub(const TempDir& dir, const std::string& model) {
    const auto out = (dir / (model + ".jsonl")).string();
    const auto r = run({"gen-stub", "--confusion", (kFixtures / "confusion" / (model + ".json")).string(), "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
}

TEST(CliDeriveMcc, TableMatchesGolden) {
    const auto r = run({"derive-mcc", "--assumptions", kDefaults});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(kFixtures / "golden" / "derive_mcc_table.txt"));
    EXPECT_NE(r.out.find("499.8"), std::string::npos);
}

TEST(CliDeriveMcc, JsonAndCsvMatchGolden) {
    EXPECT_EQ(run({"derive-mcc", "--assumptions", kDefaults, "--format", "json"}).out,
              slurp(kFixtures / "golden" / "derive_mcc.json"));
    EXPECT_EQ(run({"derive-mcc", "--assumptions", kDefaults, "--format", "csv"}).out,
              slurp(kFixtures / "golden" / "derive_mcc.csv"));
    EXPECT_EQ(run({"derive-mcc", "--assumptions", kDefaults, "--format", "xml"}).code, cli::kUsageError);
}

TEST(CliDeriveMcc, ZeroPurchaseProbabilities) {
    TempDir dir;
    auto a = default_assumptions();
    for (auto& p : a.purchase_prob.data()) p = 0.0;
    write(dir / "zero.json", assumptions_to_json(a));
    const auto r = run({"derive-mcc", "--assumptions", (dir / "zero.json").string(), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "actual,FR,HF,SP\nFR,0,0,0\nHF,0,0,0\nSP,0,0,0\n");
}

TEST(CliDeriveMcc, MissingFileNamesPath) {
    const auto r = run({"derive-mcc", "--assumptions", "/no/such/file.json"});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("/no/such/file.json"), std::string::npos);
}

TEST(CliDeriveMcc, TwoClassAssumptions) {
    const auto r = run({"derive-mcc", "--assumptions", (kFixtures / "assumptions" / "two_class.json").string(),
                        "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "actual,OK,BAD\nOK,0,7.2\nBAD,98.4,0\n");
}

TEST(CliEvaluate, PerfectStub) {
    TempDir dir;
    write(dir / "perfect.json", R"({"model_id":"perfect","classes":["FR","HF","SP"],"counts":[[150,0,0],[0,150,0],[0,0,152]]})");
    ASSERT_EQ(run({"gen-stub", "--confusion", (dir / "perfect.json").string(), "--out", (dir / "p.jsonl").string()}).code, 0);
    const auto r = run({"evaluate", "--assumptions", kDefaults, "--predictions", (dir / "p.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("accuracy         100.00%"), std::string::npos);
    EXPECT_NE(r.out.find("cumulative MCC   $0 (exact 0)"), std::string::npos);
}

TEST(CliEvaluate, SpoiledAsHalfFreshSubtotal) {
    TempDir dir;
    write(dir / "c.json", R"({"model_id":"m","classes":["FR","HF","SP"],"counts":[[150,0,0],[0,146,0],[0,10,146]]})");
    ASSERT_EQ(run({"gen-stub", "--confusion", (dir / "c.json").string(), "--out", (dir / "m.jsonl").string()}).code, 0);
    const auto r = run({"evaluate", "--assumptions", kDefaults, "--predictions", (dir / "m.jsonl").string(),
                        "--report", (dir / "report.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("$4,998 (exact 4997.5)"), std::string::npos);
    EXPECT_NE(r.out.find("97.79%"), std::string::npos);
    const auto parsed = parse_report(slurp(dir / "report.json"));
    EXPECT_EQ(parsed.report.cumulative_mcc, 4997.5);
}

TEST(CliEvaluate, ReportMatchesGolden) {
    TempDir dir;
    const auto r = run({"evaluate", "--assumptions", kDefaults, "--predictions",
                        (kFixtures / "predictions" / "small.jsonl").string(), "--report", (dir / "r.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "r.json"), slurp(kFixtures / "golden" / "small_report.json"));
}

TEST(CliEvaluate, ClassCountMismatchIsDataError) {
    const auto r = run({"evaluate", "--assumptions", (kFixtures / "assumptions" / "two_class.json").string(),
                        "--predictions", (kFixtures / "predictions" / "small.jsonl").string()});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("classes"), std::string::npos);
}

TEST(CliEvaluate, BadProbabilitiesReportLine) {
    TempDir dir;
    write(dir / "bad.jsonl",
          "{\"item_id\":\"a\",\"actual\":\"FR\",\"predicted\":\"FR\"}\n"
          "{\"item_id\":\"b\",\"actual\":\"FR\",\"predicted\":\"FR\",\"probs\":[0.4,0.3,0.1]}\n");
    const auto r = run({"evaluate", "--assumptions", kDefaults, "--predictions", (dir / "bad.jsonl").string()});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("bad.jsonl:2"), std::string::npos) << r.err;
}

TEST(CliCompare, RanksKnownModelStubs) {
    TempDir dir;
    std::vector<std::string> args{"compare", "--assumptions", kDefaults, "--predictions"};
    for (const char* m : {"UNet", "18-FT", "50-FT", "18-FE", "50-FE"}) args.push_back(stub(dir, m));
    args.insert(args.end(), {"--report", (dir / "ranking.json").string()});
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto pos = [&](const std::string& s) { return r.out.find(s); };
    EXPECT_LT(pos("50-FE"), pos("50-FT"));
    EXPECT_LT(pos("50-FT"), pos("18-FE"));
    EXPECT_LT(pos("18-FE"), pos("18-FT"));
    EXPECT_LT(pos("18-FT"), pos("UNet"));
    EXPECT_NE(r.out.find("89,411"), std::string::npos);
    EXPECT_NE(r.out.find("5,076"), std::string::npos);
    EXPECT_NE(slurp(dir / "ranking.json").find("\"rank\": 5"), std::string::npos);
}

TEST(CliCompare, SingleFileAndTies) {
    TempDir dir;
    const auto only = run({"compare", "--assumptions", kDefaults, "--predictions", stub(dir, "18-FT")});
    ASSERT_EQ(only.code, 0) << only.err;
    EXPECT_NE(only.out.find("1     18-FT"), std::string::npos);

    write(dir / "b.json", R"({"model_id":"b","classes":["FR","HF","SP"],"counts":[[1,1,0],[0,1,0],[0,0,1]]})");
    write(dir / "a.json", R"({"model_id":"a","classes":["FR","HF","SP"],"counts":[[1,1,0],[0,1,0],[0,0,1]]})");
    for (const char* m : {"a", "b"})
        ASSERT_EQ(run({"gen-stub", "--confusion", (dir / (std::string(m) + ".json")).string(), "--out",
                       (dir / (std::string(m) + ".jsonl")).string()})
                      .code,
                  0);
    const auto tied = run({"compare", "--assumptions", kDefaults, "--predictions", (dir / "b.jsonl").string(),
                           (dir / "a.jsonl").string()});
    ASSERT_EQ(tied.code, 0) << tied.err;
    EXPECT_LT(tied.out.find("1     a"), tied.out.find("2     b"));
}

TEST(CliSimulate, SeedDeterminism) {
    const std::vector<std::string> args{"simulate", "--assumptions", kDefaults, "--cell", "SP",
                                        "HF",       "--n",           "20000",   "--seed", "9", "--format", "json"};
    const auto x = run(args);
    ASSERT_EQ(x.code, 0) << x.err;
    EXPECT_EQ(x.out, run(args).out);
    auto other = args;
    other[9] = "10";
    EXPECT_NE(x.out, run(other).out);
}

TEST(CliSimulate, UsageErrors) {
    EXPECT_EQ(run({"simulate", "--assumptions", kDefaults, "--cell", "SP", "HF", "--n", "0"}).code, cli::kUsageError);
    EXPECT_EQ(run({"simulate", "--assumptions", kDefaults, "--cell", "SP", "HF"}).code, cli::kUsageError);
    EXPECT_EQ(run({"simulate", "--assumptions", kDefaults}).code, cli::kUsageError);
    EXPECT_EQ(run({"simulate", "--assumptions", kDefaults, "--cell", "XX", "HF", "--n", "5"}).code, cli::kDataError);
}

TEST(CliSimulate, ItemsFile) {
    TempDir dir;
    write(dir / "items.jsonl", "{\"actual\":\"FR\",\"predicted\":\"SP\"}\n{\"actual\":\"HF\",\"predicted\":\"SP\"}\n");
    const auto r = run({"simulate", "--assumptions", kDefaults, "--items", (dir / "items.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("total realized regret 13.50"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("expected day MCC      13.50"), std::string::npos);
}

TEST(CliEda, SyntheticTree) {
    TempDir dir;
    const char* classes[] = {"Fresh", "Half-Fresh", "Spoiled"};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i <= c; ++i) {
            const auto p = dir.path() / "data" / "train" / classes[c];
            fs::create_directories(p);
            cv::imwrite((p / ("img" + std::to_string(i) + ".png")).string(),
                        cv::Mat(3, 3, CV_8UC3, cv::Scalar(50 * c, 60, 200 - 50 * c)));
        }
    const auto out = dir / "out";
    const auto r = run({"eda", "--root", (dir / "data").string(), "--out-dir", out.string(), "--plots"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    EXPECT_TRUE(fs::exists(out / "hist_Spoiled.png"));

    std::istringstream csv(slurp(out / "histogram.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 768);
    EXPECT_NE(slurp(out / "manifest.json").find("\"total\": 6"), std::string::npos);
}

TEST(CliEda, MissingRoot) {
    TempDir dir;
    const auto r = run({"eda", "--root", "/no/such/dataset", "--out-dir", (dir / "o").string()});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("/no/such/dataset"), std::string::npos);
}

TEST(CliValidate, OkAndViolations) {
    const auto ok = run({"validate", "--assumptions", kDefaults});
    EXPECT_EQ(ok.code, 0);
    EXPECT_EQ(ok.out, "OK: 3 classes, 3 actions\n");

    TempDir dir;
    auto text = slurp(kDefaults);
    text.replace(text.find("0.9"), 3, "1.2");
    write(dir / "bad.json", text);
    const auto bad = run({"validate", "--assumptions", (dir / "bad.json").string()});
    EXPECT_EQ(bad.code, cli::kDataError);
    EXPECT_NE(bad.err.find("purchase_prob[0][0]"), std::string::npos) << bad.err;
}

TEST(CliGenStub, RoundTripThroughEvaluate) {
    TempDir dir;
    const auto path = stub(dir, "18-FT");
    EXPECT_EQ(slurp(path), slurp(kFixtures / "predictions" / "18-FT.jsonl"));
    const auto set = read_predictions(path);
    const auto doc = load_confusion(kFixtures / "confusion" / "18-FT.json");
    EXPECT_EQ(confusion_from_records(set.records, doc.matrix.labels), doc.matrix);
}

TEST(CliEnvironment, AssumptionsFromEnv) {
    ASSERT_EQ(setenv("FRESHCOST_ASSUMPTIONS", kDefaults.c_str(), 1), 0);
    const auto r = run({"validate"});
    unsetenv("FRESHCOST_ASSUMPTIONS");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(run({"validate"}).code, cli::kUsageError);
}

TEST(CliUsage, NoSubcommandAndHelp) {
    EXPECT_EQ(run({}).code, cli::kUsageError);
    const auto help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("derive-mcc"), std::string::npos);
}

}  // namespace
}  // namespace freshcost
