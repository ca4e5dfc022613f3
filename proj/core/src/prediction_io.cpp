#include "freshcost/prediction_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace freshcost {

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

bool blank(std::string_view text) {
    return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

json parse_document(std::string_view text, std::string_view what) {
    if (blank(text)) throw ParseError(fmt::format("{}: empty document", what), 1, 1);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte);
        throw ParseError(fmt::format("{}: JSON parse error at line {}, column {}: {}", what, line, col,
                                     e.what()),
                         line, col);
    }
}

// Collects structural problems while reading a JSON document.
class FieldReader {
public:
    std::vector<Violation> violations;

    void fail(std::string path, std::string message) {
        violations.push_back({std::move(path), std::move(message)});
    }

    const json* member(const json& obj, const std::string& key, const std::string& path,
                       bool required = true) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(join(path, key), "missing required field");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> string(const json* v, const std::string& path) {
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(path, "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<double> number(const json* v, const std::string& path) {
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::optional<bool> boolean(const json* v, const std::string& path) {
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(path, "expected a boolean");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    const json* array(const json* v, const std::string& path) {
        if (!v) return nullptr;
        if (!v->is_array()) {
            fail(path, "expected an array");
            return nullptr;
        }
        return v;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

std::string item_path(const std::string& base, std::size_t i) { return fmt::format("{}[{}]", base, i); }

}  // namespace

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- assumptions ------------------------------------------------------------

BusinessAssumptions parse_assumptions(std::string_view text) {
    const json doc = parse_document(text, "assumptions");
    FieldReader r;
    BusinessAssumptions a;

    if (!doc.is_object()) throw ValidationError(std::vector<Violation>{{"", "assumptions document must be a JSON object"}});

    if (auto classes = r.array(r.member(doc, "classes", ""), "classes")) {
        for (std::size_t i = 0; i < classes->size(); ++i) {
            const auto path = item_path("classes", i);
            auto name = r.string(r.member((*classes)[i], "name", path), path + ".name");
            a.classes.push_back({name.value_or(""), i});
        }
    }
    if (auto actions = r.array(r.member(doc, "actions", ""), "actions")) {
        for (std::size_t j = 0; j < actions->size(); ++j) {
            const auto path = item_path("actions", j);
            const auto& obj = (*actions)[j];
            ActionSpec spec;
            spec.name = r.string(r.member(obj, "name", path), path + ".name").value_or("");
            spec.price = r.number(r.member(obj, "price", path), path + ".price").value_or(0.0);
            spec.is_discard =
                r.boolean(r.member(obj, "is_discard", path, false), path + ".is_discard").value_or(false);
            a.actions.push_back(std::move(spec));
        }
    }
    if (const json* policy = r.member(doc, "policy", "")) {
        if (!policy->is_object()) {
            r.fail("policy", "expected an object mapping class name to action name");
        } else {
            a.policy.assign(a.classes.size(), ActionId{a.actions.size()});
            for (const auto& [cls, act] : policy->items()) {
                const auto path = "policy." + cls;
                auto ci = a.find_class(cls);
                if (!ci) {
                    r.fail(path, fmt::format("unknown class '{}'", cls));
                    continue;
                }
                auto name = r.string(&act, path);
                if (!name) continue;
                auto ai = a.find_action(*name);
                if (!ai) {
                    r.fail(path, fmt::format("unknown action '{}'", *name));
                    continue;
                }
                a.policy[ci->value] = *ai;
            }
            for (std::size_t i = 0; i < a.classes.size(); ++i)
                if (a.policy[i].value >= a.actions.size() && !policy->contains(a.classes[i].name))
                    r.fail("policy." + a.classes[i].name, "class has no action");
        }
    }
    if (auto rows = r.array(r.member(doc, "purchase_prob", ""), "purchase_prob")) {
        const std::size_t k = rows->size();
        const std::size_t m = k ? ((*rows)[0].is_array() ? (*rows)[0].size() : 0) : 0;
        a.purchase_prob = Matrix<double>(k, m);
        for (std::size_t i = 0; i < k; ++i) {
            const auto path = item_path("purchase_prob", i);
            auto row = r.array(&(*rows)[i], path);
            if (!row) continue;
            if (row->size() != m) {
                r.fail(path, fmt::format("expected {} entries, got {}", m, row->size()));
                continue;
            }
            for (std::size_t j = 0; j < m; ++j)
                a.purchase_prob(i, j) = r.number(&(*row)[j], item_path(path, j)).value_or(0.0);
        }
    }
    if (auto hazard = r.array(r.member(doc, "hazard", ""), "hazard")) {
        for (std::size_t i = 0; i < hazard->size(); ++i)
            a.hazard.push_back(r.boolean(&(*hazard)[i], item_path("hazard", i)).value_or(false));
    }
    a.incident_cost = r.number(r.member(doc, "incident_cost", ""), "incident_cost").value_or(0.0);

    if (!r.violations.empty()) throw ValidationError(std::move(r.violations));
    if (auto violations = validate_assumptions(a); !violations.empty())
        throw ValidationError(std::move(violations));
    return a;
}

BusinessAssumptions load_assumptions(const fs::path& path) {
    const auto text = read_text_file(path);
    try {
        return parse_assumptions(text);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.line(), e.column());
    }
}

std::string assumptions_to_json(const BusinessAssumptions& a, int indent) {
    ordered_json doc;
    auto classes = ordered_json::array();
    for (const auto& c : a.classes) classes.push_back({{"name", c.name}});
    doc["classes"] = classes;
    auto actions = ordered_json::array();
    for (const auto& act : a.actions)
        actions.push_back({{"name", act.name}, {"price", act.price}, {"is_discard", act.is_discard}});
    doc["actions"] = actions;
    ordered_json policy = ordered_json::object();
    for (std::size_t i = 0; i < a.policy.size() && i < a.classes.size(); ++i)
        policy[a.classes[i].name] = a.actions.at(a.policy[i].value).name;
    doc["policy"] = policy;
    auto prob = ordered_json::array();
    for (std::size_t i = 0; i < a.purchase_prob.rows(); ++i) {
        auto row = a.purchase_prob.row(i);
        prob.push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["purchase_prob"] = prob;
    doc["hazard"] = std::vector<bool>(a.hazard.begin(), a.hazard.end());
    doc["incident_cost"] = a.incident_cost;
    return doc.dump(indent);
}

// --- predictions --------------------------------------------------------------

PredictionSet parse_predictions(std::istream& in, std::string_view source_name) {
    PredictionSet set;
    std::set<std::string> header_classes;
    bool first = true;
    std::string line;
    std::size_t line_no = 0;

    auto where = [&] { return fmt::format("{}:{}", source_name, line_no); };

    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("{}: malformed JSON: {}", where(), e.what()), line_no,
                             e.byte);
        }
        if (!obj.is_object()) throw ParseError(fmt::format("{}: expected a JSON object", where()), line_no);

        if (first && obj.contains("schema_version")) {
            first = false;
            const auto& v = obj["schema_version"];
            if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion)
                throw ParseError(
                    fmt::format("{}: unsupported schema_version {} (supported: {})", where(), v.dump(),
                                kSchemaVersion),
                    line_no);
            if (obj.contains("classes")) {
                const auto& classes = obj["classes"];
                if (!classes.is_array())
                    throw ParseError(fmt::format("{}: header 'classes' must be an array", where()), line_no);
                for (const auto& c : classes) {
                    if (!c.is_string())
                        throw ParseError(fmt::format("{}: header class labels must be strings", where()),
                                         line_no);
                    if (!header_classes.insert(c.get<std::string>()).second)
                        throw ParseError(fmt::format("{}: duplicate class '{}' in header", where(),
                                                     c.get<std::string>()),
                                         line_no);
                    set.classes.push_back(c.get<std::string>());
                }
            }
            if (obj.contains("model_id")) {
                if (!obj["model_id"].is_string())
                    throw ParseError(fmt::format("{}: header 'model_id' must be a string", where()), line_no);
                set.model_id = obj["model_id"].get<std::string>();
            }
            continue;
        }
        first = false;

        PredictionRecord rec;
        for (const char* key : {"item_id", "actual", "predicted"}) {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_string())
                throw ParseError(fmt::format("{}: field '{}' must be a string", where(), key), line_no);
        }
        rec.item_id = obj["item_id"].get<std::string>();
        rec.actual = obj["actual"].get<std::string>();
        rec.predicted = obj["predicted"].get<std::string>();

        if (!header_classes.empty()) {
            for (const auto* label : {&rec.actual, &rec.predicted})
                if (!header_classes.count(*label))
                    throw DataError(fmt::format("{}: item '{}' label '{}' is not among header classes",
                                                where(), rec.item_id, *label));
        }

        if (auto it = obj.find("probs"); it != obj.end() && !it->is_null()) {
            if (!it->is_array())
                throw ParseError(fmt::format("{}: 'probs' must be an array", where()), line_no);
            std::vector<double> probs;
            double sum = 0.0;
            for (const auto& p : *it) {
                if (!p.is_number())
                    throw ParseError(fmt::format("{}: 'probs' entries must be numbers", where()), line_no);
                const double v = p.get<double>();
                if (!std::isfinite(v) || v < 0.0)
                    throw ParseError(fmt::format("{}: probability {} is not >= 0", where(), v), line_no);
                probs.push_back(v);
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw ParseError(fmt::format("{}: probabilities sum to {}, expected 1 +- 1e-6", where(), sum),
                                 line_no);
            if (!set.classes.empty() && probs.size() != set.classes.size())
                throw ParseError(fmt::format("{}: expected {} probabilities, got {}", where(),
                                             set.classes.size(), probs.size()),
                                 line_no);
            rec.probabilities = std::move(probs);
        }
        if (auto it = obj.find("model_id"); it != obj.end()) {
            if (!it->is_string())
                throw ParseError(fmt::format("{}: 'model_id' must be a string", where()), line_no);
            rec.model_id = it->get<std::string>();
        }
        set.records.push_back(std::move(rec));
    }
    if (set.model_id.empty())
        for (const auto& r : set.records)
            if (r.model_id) {
                set.model_id = *r.model_id;
                break;
            }
    return set;
}

PredictionSet read_predictions(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    auto set = parse_predictions(in, path.string());
    if (set.model_id.empty()) set.model_id = path.stem().string();
    return set;
}

void write_predictions(const PredictionSet& set, std::ostream& out) {
    ordered_json header;
    header["schema_version"] = kSchemaVersion;
    if (!set.model_id.empty()) header["model_id"] = set.model_id;
    if (!set.classes.empty()) header["classes"] = set.classes;
    out << header.dump() << '\n';
    for (const auto& r : set.records) {
        ordered_json line;
        line["item_id"] = r.item_id;
        line["actual"] = r.actual;
        line["predicted"] = r.predicted;
        if (r.probabilities) line["probs"] = *r.probabilities;
        if (r.model_id) line["model_id"] = *r.model_id;
        out << line.dump() << '\n';
    }
}

void write_predictions(const PredictionSet& set, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    write_predictions(set, out);
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

PredictionSet generate_stub(const ConfusionMatrix& cm, std::string model_id) {
    PredictionSet set;
    set.model_id = std::move(model_id);
    set.classes = cm.labels;
    const std::string prefix = set.model_id.empty() ? "item" : set.model_id;
    std::size_t n = 0;
    for (std::size_t i = 0; i < cm.size(); ++i)
        for (std::size_t j = 0; j < cm.size(); ++j)
            for (std::uint64_t c = 0; c < cm.counts(i, j); ++c)
                set.records.push_back({fmt::format("{}-{:06}", prefix, ++n), cm.labels[i], cm.labels[j],
                                       std::nullopt, std::nullopt});
    return set;
}

// --- confusion documents ------------------------------------------------------

ConfusionDocument parse_confusion(std::string_view text) {
    const json doc = parse_document(text, "confusion");
    FieldReader r;
    ConfusionDocument out;
    std::vector<std::string> labels;
    if (auto classes = r.array(r.member(doc, "classes", ""), "classes"))
        for (std::size_t i = 0; i < classes->size(); ++i)
            labels.push_back(r.string(&(*classes)[i], item_path("classes", i)).value_or(""));
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
        r.fail("classes", "class labels must be unique");
    out.matrix = ConfusionMatrix(labels);
    if (auto rows = r.array(r.member(doc, "counts", ""), "counts")) {
        if (rows->size() != labels.size())
            r.fail("counts", fmt::format("expected {} rows, got {}", labels.size(), rows->size()));
        for (std::size_t i = 0; i < std::min(rows->size(), labels.size()); ++i) {
            const auto path = item_path("counts", i);
            auto row = r.array(&(*rows)[i], path);
            if (!row) continue;
            if (row->size() != labels.size()) {
                r.fail(path, fmt::format("expected {} entries, got {}", labels.size(), row->size()));
                continue;
            }
            for (std::size_t j = 0; j < labels.size(); ++j) {
                const auto& v = (*row)[j];
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    r.fail(item_path(path, j), "expected a non-negative integer");
                    continue;
                }
                out.matrix.counts(i, j) = v.get<std::uint64_t>();
            }
        }
    }
    if (doc.is_object() && doc.contains("model_id"))
        out.model_id = r.string(&doc["model_id"], "model_id").value_or("");
    if (!r.violations.empty()) throw ValidationError(std::move(r.violations));
    return out;
}

ConfusionDocument load_confusion(const fs::path& path) {
    return parse_confusion(read_text_file(path));
}

namespace {

ordered_json counts_json(const ConfusionMatrix& cm) {
    auto rows = ordered_json::array();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        auto row = cm.counts.row(i);
        rows.push_back(std::vector<std::uint64_t>(row.begin(), row.end()));
    }
    return rows;
}

ordered_json matrix_json(const Matrix<double>& m) {
    auto rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

ordered_json report_json(const MetricsReport& report, std::optional<std::size_t> rank) {
    if (auto problems = check_report_identities(report); !problems.empty())
        throw DataError(fmt::format("refusing to write inconsistent report for '{}': {}", report.model_id,
                                    problems.front()));
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["model_id"] = report.model_id;
    doc["rank"] = rank ? ordered_json(*rank) : ordered_json(nullptr);
    doc["classes"] = report.confusion.labels;
    ordered_json metrics;
    metrics["accuracy"] = report.accuracy;
    metrics["macro_precision"] = report.macro_precision;
    metrics["macro_recall"] = report.macro_recall;
    metrics["per_class_precision"] = report.per_class_precision;
    metrics["per_class_recall"] = report.per_class_recall;
    metrics["cumulative_mcc"] = report.cumulative_mcc;
    metrics["total"] = report.confusion.total();
    metrics["correct"] = report.confusion.trace();
    doc["metrics"] = metrics;
    doc["confusion"] = counts_json(report.confusion);
    doc["mcc_matrix"] = matrix_json(report.mcc.values);
    doc["mcc_contributions"] = matrix_json(report.per_cell_mcc_contributions);
    doc["flags"] = report.flags;
    return doc;
}

Matrix<double> matrix_from(const json& rows, std::size_t k, const std::string& what) {
    if (!rows.is_array() || rows.size() != k) throw DataError(fmt::format("report: '{}' must be {}x{}", what, k, k));
    Matrix<double> m(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!rows[i].is_array() || rows[i].size() != k)
            throw DataError(fmt::format("report: '{}' must be {}x{}", what, k, k));
        for (std::size_t j = 0; j < k; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string confusion_to_json(const ConfusionMatrix& cm, std::string_view model_id, int indent) {
    ordered_json doc;
    doc["classes"] = cm.labels;
    doc["counts"] = counts_json(cm);
    if (!model_id.empty()) doc["model_id"] = model_id;
    return doc.dump(indent);
}

std::string report_to_json(const MetricsReport& report, std::optional<std::size_t> rank, int indent) {
    return report_json(report, rank).dump(indent);
}

std::string ranking_to_json(std::span<const MetricsReport> ranked, int indent) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    auto models = ordered_json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) models.push_back(report_json(ranked[i], i + 1));
    doc["ranking"] = models;
    return doc.dump(indent);
}

ParsedReport parse_report(std::string_view text) {
    const json doc = parse_document(text, "report");
    ParsedReport out;
    try {
        if (doc.at("schema_version").get<int>() != kSchemaVersion)
            throw DataError(fmt::format("report: unsupported schema_version {}", doc.at("schema_version").dump()));
        auto& r = out.report;
        r.model_id = doc.at("model_id").get<std::string>();
        if (!doc.at("rank").is_null()) out.rank = doc.at("rank").get<std::size_t>();
        const auto labels = doc.at("classes").get<std::vector<std::string>>();
        const std::size_t k = labels.size();
        const auto& metrics = doc.at("metrics");
        r.accuracy = metrics.at("accuracy").get<double>();
        r.macro_precision = metrics.at("macro_precision").get<double>();
        r.macro_recall = metrics.at("macro_recall").get<double>();
        r.per_class_precision = metrics.at("per_class_precision").get<std::vector<double>>();
        r.per_class_recall = metrics.at("per_class_recall").get<std::vector<double>>();
        r.cumulative_mcc = metrics.at("cumulative_mcc").get<double>();
        r.confusion = ConfusionMatrix(labels);
        const auto& counts = doc.at("confusion");
        if (!counts.is_array() || counts.size() != k) throw DataError("report: 'confusion' has wrong shape");
        for (std::size_t i = 0; i < k; ++i) {
            if (counts[i].size() != k) throw DataError("report: 'confusion' has wrong shape");
            for (std::size_t j = 0; j < k; ++j) r.confusion.counts(i, j) = counts[i][j].get<std::uint64_t>();
        }
        r.mcc = MccMatrix{labels, matrix_from(doc.at("mcc_matrix"), k, "mcc_matrix")};
        r.per_cell_mcc_contributions = matrix_from(doc.at("mcc_contributions"), k, "mcc_contributions");
        r.flags = doc.at("flags").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw DataError(fmt::format("report: {}", e.what()));
    }
    if (auto problems = check_report_identities(out.report); !problems.empty())
        throw DataError(fmt::format("report '{}' fails identity check: {}", out.report.model_id, problems.front()));
    return out;
}

// --- simulator I/O ------------------------------------------------------------

std::vector<SimItem> parse_sim_items(std::istream& in, const BusinessAssumptions& assumptions) {
    std::vector<SimItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("items line {}: malformed JSON: {}", line_no, e.what()), line_no);
        }
        SimItem item;
        for (auto [key, slot] : {std::pair{"actual", &item.actual}, std::pair{"predicted", &item.predicted}}) {
            if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string())
                throw ParseError(fmt::format("items line {}: field '{}' must be a string", line_no, key), line_no);
            const auto label = obj[key].get<std::string>();
            auto id = assumptions.find_class(label);
            if (!id) throw DataError(fmt::format("items line {}: unknown class '{}'", line_no, label));
            *slot = *id;
        }
        items.push_back(item);
    }
    return items;
}

std::vector<SimItem> read_sim_items(const fs::path& path, const BusinessAssumptions& assumptions) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return parse_sim_items(in, assumptions);
}

std::string sim_summary_to_json(const SimSummary& s, int indent) {
    ordered_json doc;
    doc["n"] = s.n;
    doc["seed"] = s.seed;
    doc["mean_realized_regret"] = s.mean_realized_regret;
    doc["total_realized_regret"] = s.total_realized_regret;
    doc["std_error"] = s.std_error;
    doc["total_revenue"] = s.total_revenue;
    doc["purchase_count"] = s.purchase_count;
    doc["incident_count"] = s.incident_count;
    return doc.dump(indent);
}

}  // namespace freshcost
