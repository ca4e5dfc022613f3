#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <ranges>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "freshcost/freshcost.hpp"

namespace fs = std::filesystem;

namespace freshcost::cli {

namespace {

constexpr const char* kAssumptionsEnv = "FRESHCOST_ASSUMPTIONS";

std::string percent(double fraction) { return fmt::format("{:.2f}%", fraction * 100.0); }

void print_matrix(std::ostream& out, const std::vector<std::string>& labels, auto&& cell,
                  int width = 10) {
    fmt::print(out, "{:<12}", "actual|pred");
    for (const auto& l : labels) fmt::print(out, "{:>{}}", l, width);
    fmt::print(out, "\n");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        fmt::print(out, "{:<12}", labels[i]);
        for (std::size_t j = 0; j < labels.size(); ++j) fmt::print(out, "{:>{}}", cell(i, j), width);
        fmt::print(out, "\n");
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot write '{}'", path.string()));
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

ClassId class_or_throw(const BusinessAssumptions& a, const std::string& label) {
    auto id = a.find_class(label);
    if (!id)
        throw DataError(fmt::format("unknown class '{}' (known: {})", label, fmt::join(a.class_names(), ", ")));
    return *id;
}

// --- derive-mcc ---------------------------------------------------------------

void derive_mcc(const std::string& path, const std::string& format, std::ostream& out) {
    const auto a = load_assumptions(path);
    const auto mcc = mcc_matrix(a);
    const std::size_t k = mcc.size();

    if (format == "json") {
        std::vector<std::vector<double>> values(k);
        for (std::size_t i = 0; i < k; ++i) values[i].assign(mcc.values.row(i).begin(), mcc.values.row(i).end());
        fmt::print(out, "{{\n  \"classes\": [{}],\n  \"mcc\": [\n",
                   fmt::join(mcc.labels | std::views::transform([](const auto& l) { return fmt::format("\"{}\"", l); }),
                             ", "));
        for (std::size_t i = 0; i < k; ++i)
            fmt::print(out, "    [{}]{}\n", fmt::join(values[i], ", "), i + 1 < k ? "," : "");
        fmt::print(out, "  ]\n}}\n");
        return;
    }
    if (format == "csv") {
        fmt::print(out, "actual,{}\n", fmt::join(mcc.labels, ","));
        for (std::size_t i = 0; i < k; ++i) fmt::print(out, "{},{}\n", mcc.labels[i], fmt::join(mcc.values.row(i), ","));
        return;
    }

    fmt::print(out, "MCC matrix (rows = actual, columns = predicted, $)\n");
    print_matrix(out, mcc.labels, [&](std::size_t i, std::size_t j) { return format_money(mcc.values(i, j), 1); });
    fmt::print(out, "\n{:<12}{:>16}{:>16}{:>12}\n", "actual|pred", "expected loss", "expected gain", "MCC");
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const ClassId ai{i}, pj{j};
            fmt::print(out, "{:<12}{:>16}{:>16}{:>12}\n", fmt::format("{}|{}", mcc.labels[i], mcc.labels[j]),
                       format_money(expected_loss(a, ai, pj), 2), format_money(expected_gain(a, ai, pj), 2),
                       format_money(mcc.values(i, j), 1));
        }
    }
}

// --- evaluate / compare -------------------------------------------------------

MetricsReport evaluate_file(const BusinessAssumptions& a, const fs::path& path) {
    const auto set = read_predictions(path);
    const auto classes = a.class_names();
    if (!set.classes.empty() && set.classes != classes)
        throw DataError(fmt::format("{}: prediction classes [{}] do not match assumption classes [{}]", path.string(),
                                    fmt::join(set.classes, ","), fmt::join(classes, ",")));
    return evaluate(confusion_from_records(set.records, classes), a, set.model_id);
}

void print_report(std::ostream& out, const MetricsReport& r) {
    const auto& cm = r.confusion;
    fmt::print(out, "model            {}\n", r.model_id);
    fmt::print(out, "items            {} ({} correct)\n", cm.total(), cm.trace());
    fmt::print(out, "accuracy         {}\n", percent(r.accuracy));
    fmt::print(out, "macro precision  {}\n", percent(r.macro_precision));
    fmt::print(out, "macro recall     {}\n", percent(r.macro_recall));
    fmt::print(out, "cumulative MCC   ${} (exact {})\n", format_money(r.cumulative_mcc, 0, true), r.cumulative_mcc);
    fmt::print(out, "\nconfusion (rows = actual, columns = predicted)\n");
    print_matrix(out, cm.labels, [&](std::size_t i, std::size_t j) { return fmt::format("{}", cm.counts(i, j)); });
    fmt::print(out, "\nMCC contributions ($)\n");
    print_matrix(out, cm.labels, [&](std::size_t i, std::size_t j) {
        return format_money(r.per_cell_mcc_contributions(i, j), 1);
    });
    fmt::print(out, "\n{:<8}{:>12}{:>12}\n", "class", "precision", "recall");
    for (std::size_t c = 0; c < cm.size(); ++c)
        fmt::print(out, "{:<8}{:>12}{:>12}\n", cm.labels[c], percent(r.per_class_precision[c]),
                   percent(r.per_class_recall[c]));
    for (const auto& flag : r.flags) fmt::print(out, "flag: {}\n", flag);
}

void run_evaluate(const std::string& assumptions, const std::string& predictions, const std::string& report_path,
                  std::ostream& out) {
    const auto a = load_assumptions(assumptions);
    const auto report = evaluate_file(a, predictions);
    print_report(out, report);
    if (!report_path.empty()) {
        const auto text = report_to_json(report);
        parse_report(text);
        write_file(report_path, text);
        fmt::print(out, "\nreport written to {}\n", report_path);
    }
}

void run_compare(const std::string& assumptions, const std::vector<std::string>& files,
                 const std::string& report_path, std::ostream& out) {
    const auto a = load_assumptions(assumptions);
    std::vector<MetricsReport> reports;
    for (const auto& f : files) reports.push_back(evaluate_file(a, f));
    const auto ranked = rank_models(std::move(reports));

    fmt::print(out, "{:<6}{:<20}{:>10}{:>14}{:>16}\n", "rank", "model", "accuracy", "MCC ($)", "MCC (exact)");
    for (std::size_t i = 0; i < ranked.size(); ++i)
        fmt::print(out, "{:<6}{:<20}{:>10}{:>14}{:>16}\n", i + 1, ranked[i].model_id, percent(ranked[i].accuracy),
                   format_money(ranked[i].cumulative_mcc, 0, true), fmt::format("{:.2f}", ranked[i].cumulative_mcc));
    if (!report_path.empty()) {
        write_file(report_path, ranking_to_json(ranked));
        fmt::print(out, "\nranking written to {}\n", report_path);
    }
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
    std::string assumptions;
    std::vector<std::string> cell;
    std::uint64_t n = 0;
    std::string items;
    std::uint64_t seed = 0;
    std::string format = "table";
    double incident_probability = 1.0;
    unsigned threads = 0;
};

void run_simulate(const SimulateArgs& args, std::ostream& out) {
    const auto a = load_assumptions(args.assumptions);
    SimOptions options;
    options.incident_probability = args.incident_probability;
    options.threads = args.threads;

    if (!args.cell.empty()) {
        const auto actual = class_or_throw(a, args.cell.at(0));
        const auto predicted = class_or_throw(a, args.cell.at(1));
        const auto s = estimate_mcc_empirical(a, actual, predicted, args.n, args.seed, options);
        const double analytic = mcc_cell(a, actual, predicted);
        if (args.format == "json") {
            fmt::print(out, "{}\n", sim_summary_to_json(s));
            return;
        }
        const double gap = std::abs(s.mean_realized_regret - analytic);
        fmt::print(out, "cell                  {}|{}\n", args.cell[0], args.cell[1]);
        fmt::print(out, "n                     {}\n", s.n);
        fmt::print(out, "seed                  {}\n", s.seed);
        fmt::print(out, "mean realized regret  {:.6f}\n", s.mean_realized_regret);
        fmt::print(out, "std error             {:.6f}\n", s.std_error);
        fmt::print(out, "analytic MCC          {}\n", analytic);
        fmt::print(out, "|mean - analytic|     {:.6f} ({})\n", gap,
                   s.std_error > 0 ? fmt::format("{:.3f} std errors", gap / s.std_error) : std::string("deterministic"));
        fmt::print(out, "purchases             {}\n", s.purchase_count);
        fmt::print(out, "incidents             {}\n", s.incident_count);
        fmt::print(out, "total revenue         {:.2f}\n", s.total_revenue);
        return;
    }

    const auto items = read_sim_items(args.items, a);
    const auto day = simulate_day(a, items, args.seed, options);
    const auto& s = day.summary;
    if (args.format == "json") {
        fmt::print(out, "{}\n", sim_summary_to_json(s));
        return;
    }
    double analytic = 0.0;
    for (const auto& item : items) analytic += mcc_cell(a, item.actual, item.predicted);
    fmt::print(out, "items                 {}\n", s.n);
    fmt::print(out, "seed                  {}\n", s.seed);
    fmt::print(out, "total realized regret {:.2f}\n", s.total_realized_regret);
    fmt::print(out, "mean realized regret  {:.6f}\n", s.mean_realized_regret);
    fmt::print(out, "std error             {:.6f}\n", s.std_error);
    fmt::print(out, "expected day MCC      {:.2f}\n", analytic);
    fmt::print(out, "purchases             {}\n", s.purchase_count);
    fmt::print(out, "incidents             {}\n", s.incident_count);
    fmt::print(out, "total revenue         {:.2f}\n", s.total_revenue);
}

// --- eda ----------------------------------------------------------------------

void run_eda(const std::string& root, const std::vector<std::string>& classes, const std::string& out_dir,
             bool plots, unsigned threads, std::ostream& out) {
    const auto manifest = scan_dataset(root, classes, {true, threads});
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "manifest.json", manifest_to_json(manifest));

    fmt::print(out, "{:<12}", "split");
    for (const auto& c : classes) fmt::print(out, "{:>12}", c);
    fmt::print(out, "{:>10}\n", "total");
    for (const auto& split : manifest.splits) {
        fmt::print(out, "{:<12}", split.name);
        for (auto c : split.counts) fmt::print(out, "{:>12}", c);
        fmt::print(out, "{:>10}\n", manifest.split_total(split.name));
        for (const auto& m : split.missing_classes) fmt::print(out, "  missing class folder: {}\n", m);
        for (const auto& u : split.unknown_folders) fmt::print(out, "  unknown folder: {}\n", u);
    }
    if (manifest.total() == 0) {
        fmt::print(out, "no images found under {}\n", root);
        return;
    }
    const auto balance = class_balance(manifest);
    fmt::print(out, "{:<12}", "balance");
    for (double b : balance) fmt::print(out, "{:>12}", percent(b));
    fmt::print(out, "\n");
    for (const auto& [dims, count] : manifest.dimensions)
        fmt::print(out, "dimensions {}x{}: {} images\n", dims.first, dims.second, count);

    std::vector<PixelHistogram> histograms;
    std::vector<FileIssue> issues = manifest.issues;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto files = manifest.class_files(c);
        if (files.empty()) continue;
        try {
            auto result = pixel_histogram(classes[c], files, threads);
            histograms.push_back(std::move(result.histogram));
        } catch (const DomainError& e) {
            fmt::print(out, "skipping class {}: {}\n", classes[c], e.what());
        }
    }
    {
        const auto csv = fs::path(out_dir) / "histogram.csv";
        std::ofstream f(csv, std::ios::binary);
        if (!f) throw IoError(fmt::format("cannot write '{}'", csv.string()));
        write_histogram_csv(f, histograms);
    }
    if (histograms.empty()) return;
    const auto report = histogram_report(histograms);
    fmt::print(out, "\n{:<14}{:>12}{:>16}{:>14}\n", "class", "mean pixel", "mass > 128", "pixels");
    for (const auto& row : report.rows)
        fmt::print(out, "{:<14}{:>12.2f}{:>16}{:>14}\n", row.label, row.mean, percent(row.mass_above_128), row.pixels);
    if (plots)
        for (const auto& h : histograms) render_histogram_png(h, fs::path(out_dir) / fmt::format("hist_{}.png", h.label));
    for (const auto& issue : issues) fmt::print(out, "unreadable: {} ({})\n", issue.path.string(), issue.message);
    fmt::print(out, "\nwrote {}/manifest.json and {}/histogram.csv{}\n", out_dir, out_dir, plots ? " and plots" : "");
}

// --- validate / gen-stub -------------------------------------------------------

void run_gen_stub(const std::string& confusion, const std::string& out_path, const std::string& model_id,
                  std::ostream& out) {
    const auto doc = load_confusion(confusion);
    std::string id = model_id.empty() ? doc.model_id : model_id;
    if (id.empty()) id = fs::path(confusion).stem().string();
    const auto set = generate_stub(doc.matrix, id);
    if (confusion_from_records(set.records, doc.matrix.labels) != doc.matrix)
        throw DataError("generated stub does not reproduce the confusion matrix");
    write_predictions(set, fs::path(out_path));
    fmt::print(out, "wrote {} records for model '{}' to {}\n", set.records.size(), set.model_id, out_path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"freshcost: cost-sensitive evaluation of freshness classifiers", "freshcost"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    auto add_assumptions = [](CLI::App* sub, std::string& target) {
        sub->add_option("--assumptions", target, "Business assumptions JSON")->envname(kAssumptionsEnv)->required();
    };

    std::string assumptions;
    std::string format = "table";
    auto* derive = app.add_subcommand("derive-mcc", "Print the misclassification-cost matrix");
    add_assumptions(derive, assumptions);
    derive->add_option("--format", format, "table|json|csv")->check(CLI::IsMember({"table", "json", "csv"}));

    std::string predictions;
    std::string report_path;
    auto* eval = app.add_subcommand("evaluate", "Evaluate one prediction file");
    add_assumptions(eval, assumptions);
    eval->add_option("--predictions", predictions, "Prediction file (JSON lines)")->required();
    eval->add_option("--report", report_path, "Write the JSON report here");

    std::vector<std::string> prediction_files;
    auto* compare = app.add_subcommand("compare", "Rank models by cumulative MCC");
    add_assumptions(compare, assumptions);
    compare->add_option("--predictions", prediction_files, "Prediction files")->required()->expected(1, -1);
    compare->add_option("--report", report_path, "Write the JSON ranking here");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of analytic costs");
    add_assumptions(simulate, sim.assumptions);
    auto* cell_opt = simulate->add_option("--cell", sim.cell, "ACTUAL PRED")->expected(2);
    auto* n_opt = simulate->add_option("--n", sim.n, "Trials for --cell")->check(CLI::PositiveNumber);
    auto* items_opt = simulate->add_option("--items", sim.items, "Items file (JSON lines of actual/predicted)");
    simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--format", sim.format, "table|json")->check(CLI::IsMember({"table", "json"}));
    simulate->add_option("--incident-prob", sim.incident_probability, "Incident probability on hazardous purchase")
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
    cell_opt->excludes(items_opt);
    cell_opt->needs(n_opt);
    n_opt->needs(cell_opt);

    std::string root;
    std::vector<std::string> classes{"Fresh", "Half-Fresh", "Spoiled"};
    std::string out_dir = ".";
    bool plots = false;
    unsigned threads = 0;
    auto* eda = app.add_subcommand("eda", "Dataset class balance and pixel histograms");
    eda->add_option("--root", root, "Dataset root (root/<split>/<class>/*)")->required();
    eda->add_option("--classes", classes, "Class folder names")->capture_default_str();
    eda->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    eda->add_flag("--plots", plots, "Render hist_<class>.png");
    eda->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* validate = app.add_subcommand("validate", "Validate an assumptions file");
    add_assumptions(validate, assumptions);

    std::string confusion;
    std::string stub_out;
    std::string model_id;
    auto* gen_stub = app.add_subcommand("gen-stub", "Write a prediction file realizing a confusion matrix");
    gen_stub->add_option("--confusion", confusion, "Confusion JSON")->required();
    gen_stub->add_option("--out", stub_out, "Output prediction file")->required();
    gen_stub->add_option("--model-id", model_id, "Model id (default: from the confusion file)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (*simulate && sim.cell.empty() && sim.items.empty())
            throw CLI::RequiredError("simulate needs --cell ACTUAL PRED --n N or --items FILE");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return kUsageError;
    }

    try {
        if (*derive) {
            derive_mcc(assumptions, format, out);
        } else if (*eval) {
            run_evaluate(assumptions, predictions, report_path, out);
        } else if (*compare) {
            run_compare(assumptions, prediction_files, report_path, out);
        } else if (*simulate) {
            run_simulate(sim, out);
        } else if (*eda) {
            run_eda(root, classes, out_dir, plots, threads, out);
        } else if (*validate) {
            const auto a = load_assumptions(assumptions);
            fmt::print(out, "OK: {} classes, {} actions\n", a.class_count(), a.action_count());
        } else if (*gen_stub) {
            run_gen_stub(confusion, stub_out, model_id, out);
        }
    } catch (const ValidationError& e) {
        err << "validation failed:\n";
        for (const auto& v : e.violations()) err << "  " << v.path << ": " << v.message << "\n";
        return kDataError;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

}  // namespace freshcost::cli
