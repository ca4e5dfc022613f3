#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace freshcost {

struct FileIssue {
    std::filesystem::path path;
    std::string message;
};

struct SplitManifest {
    std::string name;                                      // "train", "test", ...
    std::vector<std::size_t> counts;                       // per expected class
    std::vector<std::vector<std::filesystem::path>> files; // per expected class, sorted
    std::vector<std::string> missing_classes;
    std::vector<std::string> unknown_folders;
};

// Layout: root/<split>/<class>/*.{jpg,jpeg,png}. Splits are the immediate
// subdirectories of root, sorted lexicographically.
struct DatasetManifest {
    std::filesystem::path root;
    std::vector<std::string> classes;
    std::vector<SplitManifest> splits;
    std::map<std::pair<int, int>, std::size_t> dimensions;  // (width, height) -> images
    std::vector<FileIssue> issues;

    std::size_t split_total(std::string_view split) const;
    std::size_t class_total(std::size_t class_index) const;
    std::size_t total() const;
    // All files of one class across every split, sorted.
    std::vector<std::filesystem::path> class_files(std::size_t class_index) const;
};

struct ScanOptions {
    bool decode_images = true;  // verify decodability and record dimensions
    unsigned threads = 0;
};

// Throws IoError when root does not exist.
DatasetManifest scan_dataset(const std::filesystem::path& root,
                             std::span<const std::string> expected_classes,
                             const ScanOptions& options = {});

// Per-class fraction of all scanned images; throws DomainError when empty.
std::vector<double> class_balance(const DatasetManifest& manifest);

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // interleaved R, G, B
};

// Throws DataError when the file cannot be decoded.
RgbImage decode_image(const std::filesystem::path& path);

// Rec.601 integer luma: (299 R + 587 G + 114 B + 500) / 1000.
constexpr std::uint8_t luma_rec601(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

struct PixelHistogram {
    std::string label;
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t images_counted = 0;
    std::uint64_t pixels_counted = 0;

    void add(const RgbImage& image);
    PixelHistogram& operator+=(const PixelHistogram& other);
    bool operator==(const PixelHistogram&) const = default;
};

struct HistogramResult {
    PixelHistogram histogram;
    std::vector<FileIssue> issues;  // undecodable files, skipped
};

// Throws DomainError when no file decodes.
HistogramResult pixel_histogram(std::string label,
                                std::span<const std::filesystem::path> images,
                                unsigned threads = 0);

struct HistogramSummary {
    std::string label;
    double mean = 0.0;
    double mass_above_128 = 0.0;  // fraction of pixels with value > 128
    std::uint64_t pixels = 0;
};

struct HistogramReport {
    std::vector<HistogramSummary> rows;
};

HistogramReport histogram_report(std::span<const PixelHistogram> histograms);

// Long format: header "class,bin,count" then 256 rows per class.
void write_histogram_csv(std::ostream& out, std::span<const PixelHistogram> histograms);

// Bar chart of one histogram written as PNG.
void render_histogram_png(const PixelHistogram& histogram, const std::filesystem::path& path);

std::string manifest_to_json(const DatasetManifest& manifest, int indent = 2);

}  // namespace freshcost
