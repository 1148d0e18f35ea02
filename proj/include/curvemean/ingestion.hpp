#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curvemean/core.hpp"

namespace curvemean {

struct Record {
    std::vector<double> samples;  ///< amplitude, e.g. millivolts
    double sample_rate = 1.0;     ///< samples per second

    void validate() const;
};

struct SegmentationConfig {
    std::size_t window = 128;  ///< even, >= 4
    std::size_t min_peak_distance = 1;
    double min_prominence = 0.0;

    void validate() const;
};

/// Local maxima (0-based sample indices) whose prominence reaches
/// min_prominence, thinned greedily from the tallest down so that kept peaks
/// are at least min_peak_distance apart. Plateaus report their middle sample.
std::vector<std::size_t> detect_peaks(const Record& record, const SegmentationConfig& cfg);

/// Height of a peak above the higher of its two bases (the lowest points
/// between it and the nearest higher sample on either side).
double peak_prominence(std::span<const double> x, std::size_t peak);

struct Segmentation {
    std::vector<SampledSignal> signals;
    std::vector<std::size_t> used_peaks;
    std::vector<std::size_t> skipped_peaks;  ///< too close to either end of the record
};

/// Window-length slices with the peak at 1-based position window/2, i.e.
/// samples [peak - window/2 + 1, peak + window/2] (0-based).
Segmentation segment(const Record& record, std::span<const std::size_t> peaks, std::size_t window);

/// 0.7 * sample_rate, rounded to the nearest power of two when requested
/// and to an even count otherwise.
std::size_t default_window(double sample_rate, bool power_of_two);

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

enum class DataFormat { csv, json };

/// From the extension: ".json" selects JSON, anything else CSV.
DataFormat format_from_path(const std::filesystem::path& path);

/// One signal per CSV row (an all-text first row is skipped as a header), or
/// a JSON document {"signals": [[...], ...]}.
std::vector<SampledSignal> parse_signals_csv(const std::string& text);
std::vector<SampledSignal> parse_signals_json(const std::string& text);
std::vector<SampledSignal> load_signals(const std::filesystem::path& path, DataFormat format);
std::vector<SampledSignal> load_signals(const std::filesystem::path& path);

std::string format_signals_csv(const std::vector<SampledSignal>& signals);
std::string format_signals_json(const std::vector<SampledSignal>& signals);
void store_signals(const std::vector<SampledSignal>& signals, const std::filesystem::path& path);

/// Single-column CSV record (optional header).
Record load_record(const std::filesystem::path& path, double sample_rate);
Record parse_record_csv(const std::string& text, double sample_rate);

std::string result_to_json(const AlignmentResult& result);
AlignmentResult result_from_json(const std::string& text);
void store_result(const AlignmentResult& result, const std::filesystem::path& path);
AlignmentResult load_result(const std::filesystem::path& path);

/// 17 significant digits; reads back to the identical double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace curvemean
