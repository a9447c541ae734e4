// afis: batch front end for enrollment, verification and evaluation.
//
// Exit codes: 0 success or accept, 1 reject, 2 usage or domain error, 3 I/O.
// Diagnostics go to stderr, CSV to stdout.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "afis/enrollstore.hpp"
#include "afis/error.hpp"
#include "afis/evalkit.hpp"
#include "afis/matcher.hpp"
#include "afis/minutiae.hpp"
#include "afis/preprocess.hpp"
#include "afis/raster.hpp"
#include "afis/template.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

struct CliConfig {
    afis::PreprocessConfig preprocess;
    afis::MatchConfig match;
    double region_fraction = afis::kDefaultRegionFraction;
    std::string mode = "paper";
    double match_radius = afis::kDefaultMatchRadius;
    std::uint64_t seed = 1;

    afis::EnrollConfig enroll() const {
        return afis::EnrollConfig{preprocess, region_fraction, afis::parse_mode(mode)};
    }
};

// Failure while writing a declared output.
struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const fs::path& path, std::string_view bytes) {
    try {
        afis::write_file(path.string(), bytes);
    } catch (const afis::Error& e) {
        throw OutputError(e.what());
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw OutputError("cannot create directory " + dir.string());
}

afis::RasterImage read_input_image(const std::string& path) {
    if (!fs::is_regular_file(path))
        throw afis::Error(afis::Errc::InvalidArgument, "no such image file: " + path);
    return afis::read_image_file(path);
}

afis::Template read_input_template(const std::string& path) {
    if (!fs::is_regular_file(path))
        throw afis::Error(afis::Errc::InvalidArgument, "no such template file: " + path);
    return afis::parse(afis::read_file(path));
}

std::vector<fs::path> corpus_images(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".ppm" || ext == ".pgm" || ext == ".pnm"))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int report_match(const afis::MatchResult& r) {
    if (r.width_mismatch)
        std::cerr << "warning: templates come from images of different widths\n";
    std::cout << afis::match_csv_header() << '\n' << afis::match_csv_row(r) << '\n';
    std::cerr << (r.decision == afis::Decision::Accept ? "accept" : "reject") << " (eq " << r.eq << ", " << r.matched
              << " of " << std::max(r.n_a, r.n_b) << " minutiae paired)\n";
    return r.decision == afis::Decision::Accept ? kAccept : kReject;
}

int cmd_extract(const CliConfig& cfg, const std::string& input, const std::string& output,
                const std::string& dump_dir) {
    const afis::RasterImage img = read_input_image(input);
    const afis::EnrollConfig ec = cfg.enroll();
    ec.preprocess.validate();
    const afis::StageImages stages = afis::run_pipeline(img, ec.preprocess);
    const afis::Region region = afis::default_region(img.width(), img.height(), ec.region_fraction);
    const afis::Template t = afis::build_template(afis::clip_region(afis::extract(stages[afis::kLined]), region),
                                                  img.width(), img.height(), region, ec.mode);
    const std::string bytes = afis::serialize(t);
    write_output(output, bytes);
    if (!dump_dir.empty()) {
        make_dir(dump_dir);
        const char* names[] = {"1_filtered", "2_enhanced", "3_lined", "4_shaped"};
        for (std::size_t i = 0; i < stages.size(); ++i)
            write_output(fs::path(dump_dir) / (std::string(names[i]) + ".pgm"),
                         afis::save_image(afis::binary_to_raster(stages[i]), afis::ImageFormat::P2FromLuma));
    }
    std::cerr << "extracted " << t.size() << " minutiae, template " << bytes.size() << " bytes\n";
    return kAccept;
}

int cmd_match(const CliConfig& cfg, const std::string& a, const std::string& b) {
    return report_match(afis::match_templates(read_input_template(a), read_input_template(b), cfg.match));
}

int cmd_enroll(const CliConfig& cfg, const std::string& store, const std::string& id, const std::string& image,
               bool overwrite) {
    const afis::SubjectId subject(id);
    const afis::RasterImage img = read_input_image(image);
    afis::EnrollStore s(store);
    const auto rec = s.enroll(subject, img, cfg.enroll(), overwrite, fs::file_size(image));
    std::cerr << "enrolled " << rec.subject << ": image " << rec.source_image_bytes << " bytes, template "
              << rec.template_bytes << " bytes\n";
    return kAccept;
}

int cmd_verify(const CliConfig& cfg, const std::string& store, const std::string& id, const std::string& image) {
    const afis::SubjectId subject(id);
    const afis::RasterImage img = read_input_image(image);
    const afis::EnrollStore s(store);
    return report_match(s.verify(subject, img, cfg.match));
}

int cmd_evaluate(const CliConfig& cfg, const std::string& corpus, const std::string& truth_dir,
                 const std::string& report_dir) {
    const auto images = corpus_images(corpus);
    if (images.empty()) {
        std::cerr << "error: no .ppm/.pgm images in " << corpus << '\n';
        return kUsage;
    }
    const afis::EnrollConfig ec = cfg.enroll();
    ec.preprocess.validate();
    std::vector<afis::DetectionReportRow> detection;
    std::vector<afis::Fig2ReportRow> fig2;
    std::vector<afis::Fig3ReportRow> fig3;
    for (const fs::path& path : images) {
        const std::string id = path.stem().string();
        const fs::path gt_path = fs::path(truth_dir) / (id + ".gt");
        if (!fs::is_regular_file(gt_path)) {
            std::cerr << "warning: no ground truth for " << id << ", skipped\n";
            continue;
        }
        const afis::GroundTruth gt = afis::parse_truth(afis::read_file(gt_path.string()));
        const afis::RasterImage img = afis::read_image_file(path.string());
        const afis::StageImages stages = afis::run_pipeline(img, ec.preprocess);
        const afis::Region region = afis::default_region(img.width(), img.height(), ec.region_fraction);
        const auto detected = afis::clip_region(afis::extract(stages[afis::kLined]), region);
        const afis::GroundTruth clipped{gt.image_id, afis::clip_region(gt.points, region)};
        detection.push_back({id, afis::score_detection(detected, clipped, cfg.match_radius), cfg.match_radius});
        fig2.push_back({id, {afis::extract(afis::filter(img, ec.preprocess.threshold)).size(),
                             afis::extract(stages[afis::kLined]).size()}});
        fig3.push_back({id, afis::intensity_profile({stages.begin(), stages.end()}, img)});
    }
    if (detection.empty()) {
        std::cerr << "error: every image lacked ground truth\n";
        return kUsage;
    }
    make_dir(report_dir);
    const std::string table2 = afis::emit_report(afis::ReportKind::Table2, detection);
    write_output(fs::path(report_dir) / "table1.csv", afis::emit_report(afis::ReportKind::Table1, detection));
    write_output(fs::path(report_dir) / "table2.csv", table2);
    write_output(fs::path(report_dir) / "fig2.csv", afis::emit_report(afis::ReportKind::Fig2, fig2));
    write_output(fs::path(report_dir) / "fig3.csv", afis::emit_report(afis::ReportKind::Fig3, fig3));
    std::cout << table2;
    std::cerr << "evaluated " << detection.size() << " of " << images.size() << " images into " << report_dir << '\n';
    return kAccept;
}

int cmd_bench(const CliConfig& cfg, const std::string& corpus, const std::string& report_dir, int repetitions,
              double min_ratio) {
    const auto images = corpus_images(corpus);
    if (images.empty()) {
        std::cerr << "error: no .ppm/.pgm images in " << corpus << '\n';
        return kUsage;
    }
    make_dir(report_dir);
    std::vector<afis::TimingReportRow> rows;
    for (const fs::path& path : images)
        rows.push_back({path.stem().string(), afis::benchmark(path, cfg.enroll(), cfg.match, repetitions,
                                                              fs::path(report_dir) / "templates")});
    const std::string fig4 = afis::emit_report(afis::ReportKind::Fig4, rows);
    write_output(fs::path(report_dir) / "fig4.csv", fig4);
    write_output(fs::path(report_dir) / "fig5.csv", afis::emit_report(afis::ReportKind::Fig5, rows));
    std::cout << fig4;

    std::vector<std::string> labels;
    std::vector<double> image_kb, template_kb, full_ms, fast_ms;
    for (const auto& r : rows) {
        labels.push_back(r.image);
        image_kb.push_back(double(r.timing.image_bytes) / 1024.0);
        template_kb.push_back(double(r.timing.template_bytes) / 1024.0);
        full_ms.push_back(r.timing.full_pipeline_ms);
        fast_ms.push_back(r.timing.template_match_ms);
    }
    std::cerr << afis::ascii_chart("image size (KB)", labels, image_kb) << afis::ascii_chart("template size (KB)", labels, template_kb)
              << afis::ascii_chart("full pipeline + match (ms)", labels, full_ms)
              << afis::ascii_chart("template parse + match (ms)", labels, fast_ms);

    int status = kAccept;
    for (const auto& r : rows) {
        const double ratio = double(r.timing.image_bytes) / double(std::max<std::uintmax_t>(r.timing.template_bytes, 1));
        if (ratio < min_ratio) {
            std::cerr << "error: " << r.image << " size ratio " << ratio << " below " << min_ratio << '\n';
            status = kUsage;
        }
    }
    return status;
}

int cmd_synth(const CliConfig& cfg, const std::string& out_dir, int count, afis::SynthParams params) {
    if (count < 1) {
        std::cerr << "error: count must be >= 1\n";
        return kUsage;
    }
    make_dir(out_dir);
    for (int i = 0; i < count; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "synth_%03d", i);
        params.seed = cfg.seed + static_cast<std::uint64_t>(i);
        const auto f = afis::synth_fingerprint(params, stem);
        write_output(fs::path(out_dir) / (std::string(stem) + ".ppm"), afis::save_image(f.image, afis::ImageFormat::P3));
        write_output(fs::path(out_dir) / (std::string(stem) + ".gt"), afis::serialize_truth(f.truth));
    }
    std::cerr << "wrote " << count << " synthetic fingerprints to " << out_dir << '\n';
    return kAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fingerprint minutiae extraction, template matching and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file supplying flag defaults");

    CliConfig cfg;
    app.add_option("--threshold", cfg.preprocess.threshold, "binarization threshold")->check(CLI::Range(0, 255));
    app.add_option("--thickness", cfg.preprocess.ridge_thickness, "ridge thickness (odd)");
    app.add_option("--radius", cfg.preprocess.shape_radius, "shaping disk radius")->check(CLI::NonNegativeNumber);
    app.add_option("--region-fraction", cfg.region_fraction, "limited region side fraction");
    app.add_option("--mode", cfg.mode, "distance mode")->check(CLI::IsMember({"paper", "canonical"}));
    app.add_option("--tolerance", cfg.match.distance_tolerance, "distance agreement tolerance");
    app.add_option("--sig-fraction", cfg.match.signature_fraction, "fraction of agreeing distances to pair points");
    app.add_option("--decision-threshold", cfg.match.decision_threshold, "accept when eq >= threshold");
    app.add_option("--match-radius", cfg.match_radius, "ground-truth match radius in pixels");
    app.add_option("--seed", cfg.seed, "random seed");

    std::string in_path, out_path, dump_dir, a_path, b_path, store, id, corpus, truth_dir, report_dir;
    bool overwrite = false;
    int count = 0, repetitions = 5;
    double min_ratio = 100.0;
    afis::SynthParams synth;

    auto* extract = app.add_subcommand("extract", "image -> template file");
    extract->add_option("input", in_path, "input image (P2/P3/P5/P6)")->required();
    extract->add_option("output", out_path, "output .aft template")->required();
    extract->add_option("--dump-stages", dump_dir, "write the four stage images as P2 files");

    auto* match = app.add_subcommand("match", "compare two template files");
    match->add_option("a", a_path, "first .aft")->required();
    match->add_option("b", b_path, "second .aft")->required();

    auto* enroll = app.add_subcommand("enroll", "register a subject's fingerprint");
    auto* verify = app.add_subcommand("verify", "verify a probe against a subject");
    for (auto* sub : {enroll, verify}) {
        sub->add_option("store", store, "store directory")->required();
        sub->add_option("id", id, "subject id")->required();
        sub->add_option("image", in_path, "fingerprint image")->required();
    }
    enroll->add_flag("--overwrite", overwrite, "replace an existing enrollment");

    auto* evaluate = app.add_subcommand("evaluate", "score detection against ground truth");
    evaluate->add_option("corpus", corpus, "image directory")->required();
    evaluate->add_option("truth", truth_dir, "directory of <image>.gt files")->required();
    evaluate->add_option("report", report_dir, "output directory for CSV reports")->required();

    auto* bench = app.add_subcommand("bench", "size and timing comparison");
    bench->add_option("corpus", corpus, "image directory")->required();
    bench->add_option("report", report_dir, "output directory for CSV reports")->required();
    bench->add_option("--repetitions", repetitions, "timing repetitions (median)")->check(CLI::Range(3, 1000));
    bench->add_option("--min-ratio", min_ratio, "required image/template size ratio");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
    synth_cmd->add_option("out", out_path, "output directory")->required();
    synth_cmd->add_option("count", count, "number of images")->required();
    synth_cmd->add_option("--width", synth.width);
    synth_cmd->add_option("--height", synth.height);
    synth_cmd->add_option("--period", synth.ridge_period);
    synth_cmd->add_option("--endings", synth.n_endings);
    synth_cmd->add_option("--bifurcations", synth.n_bifurcations);
    synth_cmd->add_option("--noise", synth.noise_rate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        cfg.preprocess.validate();
        cfg.match.validate();
        if (*extract)
            return cmd_extract(cfg, in_path, out_path, dump_dir);
        if (*match)
            return cmd_match(cfg, a_path, b_path);
        if (*enroll)
            return cmd_enroll(cfg, store, id, in_path, overwrite);
        if (*verify)
            return cmd_verify(cfg, store, id, in_path);
        if (*evaluate)
            return cmd_evaluate(cfg, corpus, truth_dir, report_dir);
        if (*bench)
            return cmd_bench(cfg, corpus, report_dir, repetitions, min_ratio);
        if (*synth_cmd)
            return cmd_synth(cfg, out_path, count, synth);
    } catch (const OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const afis::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == afis::Errc::IoError ? kIo : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
