#include "curvemean/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace curvemean {

using nlohmann::json;

void Record::validate() const {
    if (samples.size() < 2) throw DomainError("a record needs at least 2 samples");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw DomainError("sample rate must be positive");
}

void SegmentationConfig::validate() const {
    if (window < 4 || window % 2 != 0) throw DomainError("segment window must be even and at least 4");
    if (min_peak_distance < 1) throw DomainError("minimum peak distance must be at least 1");
}

double peak_prominence(std::span<const double> x, std::size_t peak) {
    const double height = x[peak];
    double left_min = height;
    for (std::size_t i = peak; i-- > 0;) {
        if (x[i] > height) break;
        left_min = std::min(left_min, x[i]);
    }
    double right_min = height;
    for (std::size_t i = peak + 1; i < x.size(); ++i) {
        if (x[i] > height) break;
        right_min = std::min(right_min, x[i]);
    }
    return height - std::max(left_min, right_min);
}

std::vector<std::size_t> detect_peaks(const Record& record, const SegmentationConfig& cfg) {
    record.validate();
    if (cfg.min_peak_distance < 1) throw DomainError("minimum peak distance must be at least 1");
    const auto& x = record.samples;
    const std::size_t n = x.size();

    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < n;) {
        if (!(x[i] > x[i - 1])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end + 1 < n && x[end + 1] == x[i]) ++end;
        if (end + 1 < n && x[end + 1] < x[i]) {
            const std::size_t mid = (i + end) / 2;
            if (peak_prominence(x, mid) >= cfg.min_prominence) candidates.push_back(mid);
        }
        i = end + 1;
    }

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[candidates[a]] > x[candidates[b]]; });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const std::size_t pos = candidates[idx];
        const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return (k > pos ? k - pos : pos - k) < cfg.min_peak_distance;
        });
        if (!clash) kept.push_back(pos);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

Segmentation segment(const Record& record, std::span<const std::size_t> peaks, std::size_t window) {
    record.validate();
    if (window < 4 || window % 2 != 0) throw DomainError("segment window must be even and at least 4");
    if (window >= record.samples.size())
        throw DomainError("segment window " + std::to_string(window) + " is not shorter than the record (" +
                          std::to_string(record.samples.size()) + " samples)");
    const std::size_t before = window / 2 - 1;
    const std::size_t after = window / 2;
    Segmentation out;
    for (std::size_t peak : peaks) {
        if (peak < before || peak + after >= record.samples.size()) {
            out.skipped_peaks.push_back(peak);
            continue;
        }
        const auto first = record.samples.begin() + static_cast<std::ptrdiff_t>(peak - before);
        out.signals.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(window)));
        out.used_peaks.push_back(peak);
    }
    return out;
}

std::size_t default_window(double sample_rate, bool power_of_two) {
    if (!(sample_rate > 0.0)) throw DomainError("sample rate must be positive");
    const double target = 0.7 * sample_rate;
    if (power_of_two) {
        const double exponent = std::max(2.0, std::round(std::log2(target)));
        return std::size_t{1} << static_cast<int>(exponent);
    }
    auto w = static_cast<std::size_t>(std::llround(target / 2.0)) * 2;
    return std::max<std::size_t>(w, 4);
}

// ---------------------------------------------------------------------------

DataFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? DataFormat::json : DataFormat::csv;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view cell, double& out) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return false;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::string_view rest(text);
    std::size_t number = 0;
    while (!rest.empty()) {
        ++number;
        const auto pos = rest.find('\n');
        const auto line = rest.substr(0, pos);
        if (!trim(line).empty()) lines.emplace_back(number, line);
        if (pos == std::string_view::npos) break;
        rest.remove_prefix(pos + 1);
    }
    return lines;
}

std::vector<std::vector<double>> parse_table(const std::string& text) {
    const auto lines = content_lines(text);
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto [line_no, line] = lines[r];
        const auto cells = split_cells(line);
        std::vector<double> row(cells.size());
        bool any_number = false;
        std::size_t bad_column = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (parse_number(cells[c], row[c]))
                any_number = true;
            else if (bad_column == 0)
                bad_column = c + 1;
        }
        if (r == 0 && !any_number) continue;  // header
        if (bad_column != 0)
            throw ParseError("non-numeric cell at row " + std::to_string(line_no) + ", column " +
                             std::to_string(bad_column) + ": '" + std::string(trim(cells[bad_column - 1])) + "'");
        if (rows.empty())
            width = row.size();
        else if (row.size() != width)
            throw ParseError("ragged CSV: row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                             " values, expected " + std::to_string(width));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<SampledSignal> parse_signals_csv(const std::string& text) {
    auto rows = parse_table(text);
    if (rows.empty()) throw ParseError("dataset contains no signals");
    std::vector<SampledSignal> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 2)
            throw ParseError("signal " + std::to_string(r + 1) + " has fewer than 2 samples");
        out.emplace_back(std::move(rows[r]));
    }
    return out;
}

std::vector<SampledSignal> parse_signals_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON dataset: ") + e.what());
    }
    const json& arr = doc.is_object() ? doc.value("signals", json()) : doc;
    if (!arr.is_array() || arr.empty()) throw ParseError("JSON dataset needs a non-empty \"signals\" array");
    std::vector<SampledSignal> out;
    std::size_t width = 0;
    for (std::size_t r = 0; r < arr.size(); ++r) {
        const auto& row = arr[r];
        if (!row.is_array()) throw ParseError("signal " + std::to_string(r + 1) + " is not an array");
        std::vector<double> values;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_number())
                throw ParseError("non-numeric value at signal " + std::to_string(r + 1) + ", sample " +
                                 std::to_string(c + 1));
            values.push_back(row[c].get<double>());
        }
        if (r == 0) width = values.size();
        if (values.size() != width)
            throw ParseError("ragged dataset: signal " + std::to_string(r + 1) + " has " +
                             std::to_string(values.size()) + " values, expected " + std::to_string(width));
        if (values.size() < 2) throw ParseError("signal " + std::to_string(r + 1) + " has fewer than 2 samples");
        out.emplace_back(std::move(values));
    }
    return out;
}

std::vector<SampledSignal> load_signals(const std::filesystem::path& path, DataFormat format) {
    const auto text = read_text_file(path);
    return format == DataFormat::json ? parse_signals_json(text) : parse_signals_csv(text);
}

std::vector<SampledSignal> load_signals(const std::filesystem::path& path) {
    return load_signals(path, format_from_path(path));
}

std::string format_signals_csv(const std::vector<SampledSignal>& signals) {
    std::string out;
    for (const auto& s : signals) {
        for (std::size_t l = 0; l < s.size(); ++l) {
            if (l) out += ',';
            out += format_double(s[l]);
        }
        out += '\n';
    }
    return out;
}

std::string format_signals_json(const std::vector<SampledSignal>& signals) {
    json arr = json::array();
    for (const auto& s : signals) arr.push_back(std::vector<double>(s.values().begin(), s.values().end()));
    return json{{"signals", arr}}.dump(1) + "\n";
}

void store_signals(const std::vector<SampledSignal>& signals, const std::filesystem::path& path) {
    write_text_file(path, format_from_path(path) == DataFormat::json ? format_signals_json(signals)
                                                                     : format_signals_csv(signals));
}

Record parse_record_csv(const std::string& text, double sample_rate) {
    Record rec;
    rec.sample_rate = sample_rate;
    for (auto& row : parse_table(text)) {
        if (row.size() != 1) throw ParseError("record CSV must have a single column");
        rec.samples.push_back(row[0]);
    }
    rec.validate();
    return rec;
}

Record load_record(const std::filesystem::path& path, double sample_rate) {
    return parse_record_csv(read_text_file(path), sample_rate);
}

std::string result_to_json(const AlignmentResult& result) {
    json trace = json::array();
    for (std::size_t i = 0; i < result.trace.size(); ++i)
        trace.push_back({{"iteration", i},
                         {"criterion", result.trace[i].criterion},
                         {"step", result.trace[i].step},
                         {"backtracks", result.trace[i].backtracks}});
    json doc{{"parameters", result.ensemble.rows()},
             {"mean_curve", std::vector<double>(result.mean_curve.values().begin(), result.mean_curve.values().end())},
             {"trace", trace},
             {"iterations", result.iterations},
             {"converged", result.converged}};
    return doc.dump(1) + "\n";
}

AlignmentResult result_from_json(const std::string& text) {
    try {
        const auto doc = json::parse(text);
        AlignmentResult r;
        r.ensemble = ParamArray::from_rows(doc.at("parameters").get<std::vector<std::vector<double>>>());
        r.mean_curve = SampledSignal(doc.at("mean_curve").get<std::vector<double>>());
        for (const auto& e : doc.at("trace"))
            r.trace.push_back({e.at("criterion").get<double>(), e.at("step").get<double>(), e.at("backtracks").get<int>()});
        r.iterations = doc.at("iterations").get<int>();
        r.converged = doc.at("converged").get<bool>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed result JSON: ") + e.what());
    }
}

void store_result(const AlignmentResult& result, const std::filesystem::path& path) {
    write_text_file(path, result_to_json(result));
}

AlignmentResult load_result(const std::filesystem::path& path) { return result_from_json(read_text_file(path)); }

}  // namespace curvemean
