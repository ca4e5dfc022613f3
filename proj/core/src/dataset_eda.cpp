#include "freshcost/dataset_eda.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "detail/parallel.hpp"
#include "freshcost/errors.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace freshcost {

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory()) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<fs::path> sorted_images(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::size_t DatasetManifest::split_total(std::string_view split) const {
    for (const auto& s : splits) {
        if (s.name != split) continue;
        std::size_t sum = 0;
        for (auto c : s.counts) sum += c;
        return sum;
    }
    return 0;
}

std::size_t DatasetManifest::class_total(std::size_t class_index) const {
    std::size_t sum = 0;
    for (const auto& s : splits) sum += s.counts.at(class_index);
    return sum;
}

std::size_t DatasetManifest::total() const {
    std::size_t sum = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) sum += class_total(c);
    return sum;
}

std::vector<fs::path> DatasetManifest::class_files(std::size_t class_index) const {
    std::vector<fs::path> out;
    for (const auto& s : splits)
        out.insert(out.end(), s.files.at(class_index).begin(), s.files.at(class_index).end());
    std::sort(out.begin(), out.end());
    return out;
}

DatasetManifest scan_dataset(const fs::path& root, std::span<const std::string> expected_classes,
                             const ScanOptions& options) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw IoError(fmt::format("dataset root '{}' does not exist or is not a directory", root.string()));

    DatasetManifest m;
    m.root = root;
    m.classes.assign(expected_classes.begin(), expected_classes.end());
    const std::set<std::string> known(m.classes.begin(), m.classes.end());

    for (const auto& split_dir : sorted_subdirs(root)) {
        SplitManifest split;
        split.name = split_dir.filename().string();
        split.counts.assign(m.classes.size(), 0);
        split.files.assign(m.classes.size(), {});
        for (const auto& class_dir : sorted_subdirs(split_dir)) {
            const auto name = class_dir.filename().string();
            if (!known.count(name)) split.unknown_folders.push_back(name);
        }
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            const auto class_dir = split_dir / m.classes[c];
            if (!fs::is_directory(class_dir, ec)) {
                split.missing_classes.push_back(m.classes[c]);
                continue;
            }
            split.files[c] = sorted_images(class_dir);
            split.counts[c] = split.files[c].size();
        }
        m.splits.push_back(std::move(split));
    }

    if (!options.decode_images) return m;

    std::vector<fs::path> all;
    for (const auto& s : m.splits)
        for (const auto& files : s.files) all.insert(all.end(), files.begin(), files.end());

    std::vector<std::pair<int, int>> dims(all.size(), {-1, -1});
    std::vector<std::string> errors(all.size());
    detail::parallel_chunks(all.size(), options.threads, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) {
            cv::Mat img = cv::imread(all[i].string(), cv::IMREAD_UNCHANGED);
            if (img.empty())
                errors[i] = "could not decode image";
            else
                dims[i] = {img.cols, img.rows};
        }
    });
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (errors[i].empty())
            ++m.dimensions[dims[i]];
        else
            m.issues.push_back({all[i], errors[i]});
    }
    return m;
}

std::vector<double> class_balance(const DatasetManifest& manifest) {
    const auto total = manifest.total();
    if (total == 0) throw DomainError("class_balance of an empty manifest");
    std::vector<double> out(manifest.classes.size());
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = static_cast<double>(manifest.class_total(c)) / static_cast<double>(total);
    return out;
}

RgbImage decode_image(const fs::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw DataError(fmt::format("could not decode image '{}'", path.string()));
    RgbImage img;
    img.width = bgr.cols;
    img.height = bgr.rows;
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    std::size_t k = 0;
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img.rgb[k++] = row[x][2];
            img.rgb[k++] = row[x][1];
            img.rgb[k++] = row[x][0];
        }
    }
    return img;
}

void PixelHistogram::add(const RgbImage& image) {
    const std::size_t pixels = static_cast<std::size_t>(image.width) * image.height;
    if (image.rgb.size() != pixels * 3)
        throw ArgumentError("image buffer size does not match width * height * 3");
    for (std::size_t p = 0; p < pixels; ++p)
        ++bins[luma_rec601(image.rgb[3 * p], image.rgb[3 * p + 1], image.rgb[3 * p + 2])];
    pixels_counted += pixels;
    ++images_counted;
}

PixelHistogram& PixelHistogram::operator+=(const PixelHistogram& other) {
    for (std::size_t b = 0; b < bins.size(); ++b) bins[b] += other.bins[b];
    images_counted += other.images_counted;
    pixels_counted += other.pixels_counted;
    return *this;
}

HistogramResult pixel_histogram(std::string label, std::span<const fs::path> images,
                                unsigned threads) {
    const unsigned workers = detail::resolve_threads(threads, images.size());
    std::vector<PixelHistogram> partial(workers);
    std::vector<std::string> errors(images.size());
    detail::parallel_chunks(images.size(), workers, [&](std::size_t b, std::size_t e, unsigned w) {
        for (std::size_t i = b; i < e; ++i) {
            try {
                partial[w].add(decode_image(images[i]));
            } catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    });

    HistogramResult out;
    out.histogram.label = std::move(label);
    for (const auto& h : partial) out.histogram += h;
    for (std::size_t i = 0; i < images.size(); ++i)
        if (!errors[i].empty()) out.issues.push_back({images[i], errors[i]});
    if (out.histogram.images_counted == 0)
        throw DomainError(
            fmt::format("no decodable images for class '{}' ({} files)", out.histogram.label, images.size()));
    return out;
}

HistogramReport histogram_report(std::span<const PixelHistogram> histograms) {
    if (histograms.empty()) throw ArgumentError("histogram_report needs at least one histogram");
    HistogramReport report;
    for (const auto& h : histograms) {
        HistogramSummary row;
        row.label = h.label;
        row.pixels = h.pixels_counted;
        if (h.pixels_counted > 0) {
            double weighted = 0.0;
            std::uint64_t above = 0;
            for (std::size_t b = 0; b < 256; ++b) {
                weighted += static_cast<double>(b) * static_cast<double>(h.bins[b]);
                if (b > 128) above += h.bins[b];
            }
            const auto n = static_cast<double>(h.pixels_counted);
            row.mean = weighted / n;
            row.mass_above_128 = static_cast<double>(above) / n;
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_histogram_csv(std::ostream& out, std::span<const PixelHistogram> histograms) {
    out << "class,bin,count\n";
    for (const auto& h : histograms)
        for (std::size_t b = 0; b < 256; ++b) out << h.label << ',' << b << ',' << h.bins[b] << '\n';
}

void render_histogram_png(const PixelHistogram& h, const fs::path& path) {
    constexpr int kBar = 2;
    constexpr int kPlotH = 300;
    constexpr int kMargin = 40;
    const int width = 256 * kBar + 2 * kMargin;
    const int height = kPlotH + 2 * kMargin;
    cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));

    const auto peak = *std::max_element(h.bins.begin(), h.bins.end());
    for (int b = 0; b < 256; ++b) {
        if (peak == 0) break;
        const int bar = static_cast<int>(static_cast<double>(h.bins[b]) / static_cast<double>(peak) * kPlotH);
        if (bar == 0) continue;
        const int x = kMargin + b * kBar;
        cv::rectangle(canvas, cv::Point(x, kMargin + kPlotH - bar), cv::Point(x + kBar - 1, kMargin + kPlotH),
                      cv::Scalar(180, 110, 40), cv::FILLED);
    }
    const cv::Scalar black(0, 0, 0);
    cv::line(canvas, {kMargin, kMargin + kPlotH}, {kMargin + 256 * kBar, kMargin + kPlotH}, black);
    cv::line(canvas, {kMargin, kMargin}, {kMargin, kMargin + kPlotH}, black);
    cv::putText(canvas, "0", {kMargin - 4, height - 18}, cv::FONT_HERSHEY_SIMPLEX, 0.4, black);
    cv::putText(canvas, "255", {kMargin + 256 * kBar - 12, height - 18}, cv::FONT_HERSHEY_SIMPLEX, 0.4, black);
    cv::putText(canvas, fmt::format("{} ({} images)", h.label, h.images_counted), {kMargin, 25},
                cv::FONT_HERSHEY_SIMPLEX, 0.5, black);
    if (!cv::imwrite(path.string(), canvas))
        throw IoError(fmt::format("could not write '{}'", path.string()));
}

std::string manifest_to_json(const DatasetManifest& m, int indent) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["root"] = m.root.string();
    doc["classes"] = m.classes;
    auto splits = nlohmann::ordered_json::array();
    for (const auto& s : m.splits) {
        nlohmann::ordered_json js;
        js["name"] = s.name;
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        std::size_t total = 0;
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            counts[m.classes[c]] = s.counts[c];
            total += s.counts[c];
        }
        js["counts"] = counts;
        js["total"] = total;
        js["missing_classes"] = s.missing_classes;
        js["unknown_folders"] = s.unknown_folders;
        splits.push_back(js);
    }
    doc["splits"] = splits;
    nlohmann::ordered_json totals = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < m.classes.size(); ++c) totals[m.classes[c]] = m.class_total(c);
    doc["class_totals"] = totals;
    doc["total"] = m.total();
    auto dims = nlohmann::ordered_json::array();
    for (const auto& [wh, count] : m.dimensions)
        dims.push_back({{"width", wh.first}, {"height", wh.second}, {"images", count}});
    doc["dimensions"] = dims;
    auto issues = nlohmann::ordered_json::array();
    for (const auto& issue : m.issues)
        issues.push_back({{"path", issue.path.string()}, {"message", issue.message}});
    doc["issues"] = issues;
    return doc.dump(indent);
}

}  // namespace freshcost
