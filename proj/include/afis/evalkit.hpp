#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "afis/enrollstore.hpp"
#include "afis/matcher.hpp"
#include "afis/minutiae.hpp"
#include "afis/preprocess.hpp"
#include "afis/raster.hpp"

namespace afis {

/// Manually annotated minutiae of one image.
struct GroundTruth {
    std::string image_id;
    std::vector<Minutia> points;

    bool operator==(const GroundTruth&) const = default;
};

/// "AFIS-TRUTH 1" / "image <id>" / "p <x> <y> <e|b>"...
std::string serialize_truth(const GroundTruth& gt);
GroundTruth parse_truth(std::string_view bytes);

/// Detection outcome against ground truth. selected = correct + false_pos,
/// contained = correct + dropped.
struct EvalRow {
    std::int64_t contained = 0;
    std::int64_t selected = 0;
    std::int64_t dropped = 0;
    std::int64_t false_pos = 0;
    std::int64_t correct = 0;

    bool operator==(const EvalRow&) const = default;
};

inline constexpr double kDefaultMatchRadius = 8.0;

/// Greedy one-to-one pairing by ascending Euclidean distance, pairs within
/// match_radius (inclusive). Minutia kind is ignored.
EvalRow score_detection(const std::vector<Minutia>& detected, const GroundTruth& truth, double match_radius);

/// Exact ratio 100 * num / den, rounded only for presentation.
struct Percent {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const noexcept { return 100.0 * double(num) / double(den); }
    /// Round-half-up to hundredths of a percent.
    std::int64_t hundredths() const noexcept { return (20000 * num + den) / (2 * den); }
    double rounded() const noexcept { return double(hundredths()) / 100.0; }
    std::string str() const;  // "48.65"
};

struct PercentRow {
    Percent false_pct;
    Percent drop_pct;
    Percent correct_pct;
};

/// Throws ZeroContained when row.contained is 0.
PercentRow percentages(const EvalRow& row);

struct PoorImproved {
    std::size_t poor = 0;
    std::size_t improved = 0;
};

/// Minutiae count on the merely binarized image versus on the thinned stage.
PoorImproved poor_vs_improved(const RasterImage& raw, const PreprocessConfig& cfg);

struct TimingRow {
    std::uintmax_t image_bytes = 0;
    std::uintmax_t template_bytes = 0;
    double full_pipeline_ms = 0.0;
    double template_match_ms = 0.0;
};

/// Median over repetitions (>= 3) of: load -> preprocess -> extract ->
/// template -> match, versus parse two .aft files -> match. The template is
/// written into work_dir as <stem>.aft.
TimingRow benchmark(const std::filesystem::path& img_path, const EnrollConfig& cfg, const MatchConfig& match_cfg,
                    int repetitions, const std::filesystem::path& work_dir);

struct SynthParams {
    std::uint64_t seed = 1;
    int width = 300;
    int height = 300;
    int ridge_period = 8;
    int n_endings = 6;
    int n_bifurcations = 4;
    double noise_rate = 0.0;

    void validate() const;  // throws ParamError
};

struct SynthFingerprint {
    RasterImage image;
    GroundTruth truth;
};

/// Deterministic wavy ridge grating with injected ridge gaps (endings) and
/// Y-joins (bifurcations), placed inside the default limited region. Noise
/// flips pixels outside the annotation neighborhoods.
SynthFingerprint synth_fingerprint(const SynthParams& params, std::string image_id = "synth");

/// Second impression of the same finger: content shifted by (dx, dy) with
/// white fill, then noise_rate of pixels flipped at seeded positions.
RasterImage second_impression(const RasterImage& img, int dx, int dy, double noise_rate, std::uint64_t seed);

enum class ReportKind { Table1, Table2, Fig2, Fig3, Fig4, Fig5 };

std::string_view report_name(ReportKind kind) noexcept;

struct DetectionReportRow {
    std::string image;
    EvalRow row;
    double match_radius = kDefaultMatchRadius;
};

struct Fig2ReportRow {
    std::string image;
    PoorImproved counts;
};

struct Fig3ReportRow {
    std::string image;
    std::vector<double> profile;  // input, filtered, enhanced, lined, shaped
};

struct TimingReportRow {
    std::string image;
    TimingRow timing;
};

/// CSV with a fixed header per kind. Throws ParamError when the kind does not
/// fit the row type.
std::string emit_report(ReportKind kind, std::span<const DetectionReportRow> rows);
std::string emit_report(ReportKind kind, std::span<const Fig2ReportRow> rows);
std::string emit_report(ReportKind kind, std::span<const Fig3ReportRow> rows);
std::string emit_report(ReportKind kind, std::span<const TimingReportRow> rows);

/// Horizontal bar chart, one labelled bar per value.
std::string ascii_chart(std::string_view title, std::span<const std::string> labels,
                        std::span<const double> values, int bar_width = 50);

}  // namespace afis
