#include "afis/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "afis/error.hpp"

namespace afis {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- truth files

std::string serialize_truth(const GroundTruth& gt) {
    std::string out = "AFIS-TRUTH 1\nimage " + gt.image_id + "\n";
    for (const Minutia& m : gt.points) {
        out += "p " + std::to_string(m.x) + ' ' + std::to_string(m.y) + ' ';
        out += kind_code(m.kind);
        out += '\n';
    }
    return out;
}

GroundTruth parse_truth(std::string_view bytes) {
    std::istringstream in{std::string(bytes)};
    std::string line;
    if (!std::getline(in, line) || line != "AFIS-TRUTH 1")
        throw Error(Errc::BadMagic, "not an AFIS-TRUTH 1 file");
    GroundTruth gt;
    if (!std::getline(in, line) || line.rfind("image ", 0) != 0 || line.size() == 6)
        throw Error(Errc::BadField, "missing image line");
    gt.image_id = line.substr(6);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string tag, kind, extra;
        Minutia m;
        if (!(fields >> tag >> m.x >> m.y >> kind) || (fields >> extra) || tag != "p" || m.x < 0 || m.y < 0 ||
            (kind != "e" && kind != "b"))
            throw Error(Errc::BadField, "bad point line: " + line);
        m.kind = kind == "e" ? MinutiaKind::Ending : MinutiaKind::Bifurcation;
        gt.points.push_back(m);
    }
    return gt;
}

// ------------------------------------------------------------------- scoring

EvalRow score_detection(const std::vector<Minutia>& detected, const GroundTruth& truth, double match_radius) {
    if (!(match_radius >= 0.0))
        throw Error(Errc::InvalidArgument, "match radius must be >= 0");
    struct Edge {
        std::int64_t dist2;
        std::size_t d, t;
    };
    const double r2 = match_radius * match_radius;
    std::vector<Edge> edges;
    for (std::size_t d = 0; d < detected.size(); ++d)
        for (std::size_t t = 0; t < truth.points.size(); ++t) {
            const std::int64_t dx = detected[d].x - truth.points[t].x;
            const std::int64_t dy = detected[d].y - truth.points[t].y;
            const std::int64_t dist2 = dx * dx + dy * dy;
            if (double(dist2) <= r2)
                edges.push_back({dist2, d, t});
        }
    // Ties are broken on coordinates, never on list position, so the counts do
    // not depend on input order.
    auto key = [&](const Edge& e) {
        const Minutia& a = detected[e.d];
        const Minutia& b = truth.points[e.t];
        return std::tuple(e.dist2, a.y, a.x, a.kind, b.y, b.x, b.kind);
    };
    std::sort(edges.begin(), edges.end(), [&](const Edge& l, const Edge& r) { return key(l) < key(r); });

    std::vector<bool> det_used(detected.size()), truth_used(truth.points.size());
    std::int64_t correct = 0;
    for (const Edge& e : edges) {
        if (det_used[e.d] || truth_used[e.t])
            continue;
        det_used[e.d] = truth_used[e.t] = true;
        ++correct;
    }
    EvalRow row;
    row.contained = static_cast<std::int64_t>(truth.points.size());
    row.selected = static_cast<std::int64_t>(detected.size());
    row.correct = correct;
    row.false_pos = row.selected - correct;
    row.dropped = row.contained - correct;
    return row;
}

std::string Percent::str() const {
    const std::int64_t h = hundredths();
    char buf[48];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(h / 100), static_cast<long long>(h % 100));
    return buf;
}

PercentRow percentages(const EvalRow& row) {
    if (row.contained <= 0)
        throw Error(Errc::ZeroContained, "percentages need at least one contained minutia");
    return PercentRow{Percent{row.false_pos, row.contained}, Percent{row.dropped, row.contained},
                      Percent{row.correct, row.contained}};
}

PoorImproved poor_vs_improved(const RasterImage& raw, const PreprocessConfig& cfg) {
    cfg.validate();
    PoorImproved out;
    out.poor = extract(filter(raw, cfg.threshold)).size();
    out.improved = extract(run_pipeline(raw, cfg)[kLined]).size();
    return out;
}

// ----------------------------------------------------------------- benchmark

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double time_ms(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

TimingRow benchmark(const fs::path& img_path, const EnrollConfig& cfg, const MatchConfig& match_cfg, int repetitions,
                    const fs::path& work_dir) {
    if (repetitions < 3)
        throw Error(Errc::ParamError, "benchmark needs at least 3 repetitions");
    std::error_code ec;
    if (!fs::is_regular_file(img_path, ec))
        throw Error(Errc::IoError, "cannot read " + img_path.string());
    fs::create_directories(work_dir, ec);
    const fs::path aft = work_dir / (img_path.stem().string() + ".aft");

    const Template reference = make_template(read_image_file(img_path.string()), cfg);
    atomic_write(aft, serialize(reference));

    TimingRow row;
    row.image_bytes = fs::file_size(img_path);
    row.template_bytes = fs::file_size(aft);

    std::vector<double> full, fast;
    std::size_t sink = 0;
    for (int i = 0; i < repetitions; ++i) {
        full.push_back(time_ms([&] {
            const Template probe = make_template(read_image_file(img_path.string()), cfg);
            sink += match_templates(reference, probe, match_cfg).matched;
        }));
        fast.push_back(time_ms([&] {
            const Template a = parse(read_file(aft.string()));
            const Template b = parse(read_file(aft.string()));
            sink += match_templates(a, b, match_cfg).matched;
        }));
    }
    if (sink == std::size_t(-1))
        std::fputc('\0', stderr);
    row.full_pipeline_ms = median(full);
    row.template_match_ms = median(fast);
    return row;
}

// ----------------------------------------------------------------- synthesis

void SynthParams::validate() const {
    if (width < 32 || height < 32 || width > kMaxImageSide || height > kMaxImageSide)
        throw Error(Errc::ParamError, "synthetic image must be at least 32x32");
    if (ridge_period < 4)
        throw Error(Errc::ParamError, "ridge period must be >= 4");
    if (n_endings < 0 || n_bifurcations < 0)
        throw Error(Errc::ParamError, "minutiae counts must be >= 0");
    if (!(noise_rate >= 0.0 && noise_rate <= 0.2))
        throw Error(Errc::ParamError, "noise rate must be in [0, 0.2]");
}

namespace {

// Engine output is fully specified by the standard; the distributions are
// not, so the mapping to ranges is done here to keep images identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int pick(int lo, int hi) { return lo + static_cast<int>(engine_() % std::uint64_t(hi - lo + 1)); }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[engine_() % i]);
    }

private:
    std::mt19937_64 engine_;
};

struct Segment {
    double x0, y0, x1, y1, radius;

    bool covers(double px, double py) const {
        const double vx = x1 - x0, vy = y1 - y0;
        const double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((px - x0) * vx + (py - y0) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = px - (x0 + t * vx), dy = py - (y0 + t * vy);
        return dx * dx + dy * dy <= radius * radius;
    }
};

void flip_pixels(RasterImage& img, double rate, Rng& rng, const std::vector<Minutia>& keep_clear, int clear_radius) {
    const std::size_t area = std::size_t(img.width()) * std::size_t(img.height());
    const auto flips = static_cast<std::size_t>(std::llround(rate * double(area)));
    std::vector<bool> flipped(area, false);
    for (std::size_t n = 0; n < flips; ++n) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const int x = rng.pick(0, img.width() - 1);
            const int y = rng.pick(0, img.height() - 1);
            if (flipped[img.index(x, y)])
                continue;
            const bool near = std::any_of(keep_clear.begin(), keep_clear.end(), [&](const Minutia& m) {
                return (m.x - x) * (m.x - x) + (m.y - y) * (m.y - y) <= clear_radius * clear_radius;
            });
            if (near)
                continue;
            flipped[img.index(x, y)] = true;
            Pixel& p = img.at(x, y);
            p = p.mean() < 128 ? kWhite : kBlack;
            break;
        }
    }
}

}  // namespace

SynthFingerprint synth_fingerprint(const SynthParams& params, std::string image_id) {
    params.validate();
    Rng rng(params.seed);
    const int w = params.width, h = params.height;
    const double period = params.ridge_period;
    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // Ridge k covers u = x + 0.5 - drift(y) in [k * period, k * period + period / 2).
    const double phase = rng.uniform(0.0, period);
    const double amplitude = rng.uniform(1.0, 0.4 * period);
    const double wavelength = rng.uniform(80.0, 160.0);
    const double psi = rng.uniform(0.0, kTwoPi);
    auto drift = [&](double y) { return phase + amplitude * std::sin(kTwoPi * y / wavelength + psi); };
    auto ridge_of = [&](int x, int y) -> int {
        const double u = x + 0.5 - drift(y);
        const double k = std::floor(u / period);
        return (u - k * period) < period / 2.0 ? static_cast<int>(k) : std::numeric_limits<int>::min();
    };
    auto center = [&](int k, int y) { return k * period + period / 4.0 + drift(y) - 0.5; };

    const Region region = default_region(w, h, kDefaultRegionFraction);
    const int margin = std::max(2 * params.ridge_period, 12);
    const int fx0 = region.x0 + margin, fx1 = region.x1 - margin;
    const int fy0 = region.y0 + margin, fy1 = region.y1 - margin;

    // Ridges whose centre line stays inside the feature window for every row.
    std::vector<int> ridges;
    for (int k = -2; k * period < w + period; ++k) {
        bool inside = true;
        for (int y = 0; y < h && inside; ++y) {
            const double c = center(k, y);
            inside = c >= fx0 && c <= fx1;
        }
        if (inside)
            ridges.push_back(k);
    }

    struct Erase {
        int ridge, y_from, y_to;  // inclusive rows
    };
    std::vector<Erase> erased;
    std::vector<Segment> joins;
    std::vector<Minutia> truth;
    std::vector<std::pair<int, int>> forks;  // (ridge, bottom row of the join)
    std::vector<int> used;
    auto is_used = [&](int k) { return std::find(used.begin(), used.end(), k) != used.end(); };
    auto at = [&](int k, int y) { return Minutia{static_cast<int>(std::lround(center(k, y))), y, MinutiaKind::Ending}; };

    std::vector<int> order = ridges;
    rng.shuffle(order);

    // Y-joins: ridge k + 1 is erased above row y0 and bent into ridge k.
    const int rise = params.ridge_period;
    for (int n = 0; n < params.n_bifurcations; ++n) {
        auto it = std::find_if(order.begin(), order.end(), [&](int k) {
            return !is_used(k) && !is_used(k + 1) && std::find(ridges.begin(), ridges.end(), k + 1) != ridges.end();
        });
        if (it == order.end())
            throw Error(Errc::ParamError, "image too small for the requested bifurcations");
        const int k = *it;
        used.push_back(k);
        used.push_back(k + 1);
        const int y0 = rng.pick(fy0 + rise, fy1);
        const double x_from = center(k + 1, y0), x_to = center(k, y0 - rise);
        erased.push_back({k + 1, 0, y0 - 1});
        joins.push_back({x_from, double(y0), x_to, double(y0 - rise), period / 4.0});
        forks.push_back({k, y0});
    }

    // Endings: gaps produce two, a leftover odd one truncates a ridge downwards.
    for (int remaining = params.n_endings; remaining > 0;) {
        auto it = std::find_if(order.begin(), order.end(), [&](int k) { return !is_used(k); });
        if (it == order.end())
            throw Error(Errc::ParamError, "image too small for the requested endings");
        const int k = *it;
        used.push_back(k);
        if (remaining >= 2) {
            const int gap = rng.pick(2 * params.ridge_period, 4 * params.ridge_period);
            const int top = rng.pick(fy0, fy1 - gap - 1);
            erased.push_back({k, top + 1, top + gap});
            truth.push_back(at(k, top));
            truth.push_back(at(k, top + gap + 1));
            remaining -= 2;
        } else {
            const int top = rng.pick(fy0, fy1);
            erased.push_back({k, top + 1, h - 1});
            truth.push_back(at(k, top));
            remaining -= 1;
        }
    }

    RasterImage img(w, h, kWhite);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int k = ridge_of(x, y);
            bool black = k != std::numeric_limits<int>::min() &&
                         std::none_of(erased.begin(), erased.end(),
                                      [&](const Erase& e) { return e.ridge == k && y >= e.y_from && y <= e.y_to; });
            if (!black)
                black = std::any_of(joins.begin(), joins.end(),
                                    [&](const Segment& s) { return s.covers(x + 0.5, y + 0.5); });
            if (black)
                img.at(x, y) = kBlack;
        }

    // A fork is annotated where the valley between ridge k and the joining
    // branch closes: the first row, walking up the join, with no white cell
    // between the two centre lines.
    for (std::size_t n = 0; n < forks.size(); ++n) {
        const auto [k, y0] = forks[n];
        const Segment& s = joins[n];
        int fork_y = y0 - rise;
        double fork_x = s.x1;
        for (int y = y0; y >= y0 - rise; --y) {
            const double branch = s.x0 + (s.x1 - s.x0) * double(y0 - y) / double(rise);
            const int lo = static_cast<int>(std::lround(center(k, y)));
            const int hi = static_cast<int>(std::lround(branch));
            bool open = false;
            for (int x = lo; x <= hi && !open; ++x)
                open = img.at(x, y) == kWhite;
            if (!open) {
                fork_y = y;
                fork_x = 0.5 * (center(k, y) + branch);
                break;
            }
        }
        truth.push_back({static_cast<int>(std::lround(fork_x)), fork_y, MinutiaKind::Bifurcation});
    }

    flip_pixels(img, params.noise_rate, rng, truth, margin / 2);
    std::sort(truth.begin(), truth.end(), canonical_less);
    return {std::move(img), GroundTruth{std::move(image_id), std::move(truth)}};
}

RasterImage second_impression(const RasterImage& img, int dx, int dy, double noise_rate, std::uint64_t seed) {
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0))
        throw Error(Errc::ParamError, "noise rate must be in [0,1]");
    RasterImage out(img.width(), img.height(), kWhite);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const int sx = x - dx, sy = y - dy;
            if (sx >= 0 && sy >= 0 && sx < img.width() && sy < img.height())
                out.at(x, y) = img.at(sx, sy);
        }
    Rng rng(seed);
    flip_pixels(out, noise_rate, rng, {}, 0);
    return out;
}

// ------------------------------------------------------------------- reports

std::string_view report_name(ReportKind kind) noexcept {
    switch (kind) {
    case ReportKind::Table1: return "table1";
    case ReportKind::Table2: return "table2";
    case ReportKind::Fig2: return "fig2";
    case ReportKind::Fig3: return "fig3";
    case ReportKind::Fig4: return "fig4";
    case ReportKind::Fig5: return "fig5";
    }
    return "unknown";
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void wrong_kind(ReportKind kind) {
    throw Error(Errc::ParamError, "report kind " + std::string(report_name(kind)) + " does not fit these rows");
}

}  // namespace

std::string emit_report(ReportKind kind, std::span<const DetectionReportRow> rows) {
    std::string out;
    if (kind == ReportKind::Table1) {
        out = "image,contained,selected,dropped,false,correct,match_radius\n";
        for (const auto& r : rows)
            out += r.image + ',' + std::to_string(r.row.contained) + ',' + std::to_string(r.row.selected) + ',' +
                   std::to_string(r.row.dropped) + ',' + std::to_string(r.row.false_pos) + ',' +
                   std::to_string(r.row.correct) + ',' + fixed(r.match_radius, 2) + '\n';
    } else if (kind == ReportKind::Table2) {
        out = "image,false_pct,drop_pct,correct_pct\n";
        for (const auto& r : rows) {
            if (r.row.contained <= 0) {
                out += r.image + ",,,\n";
                continue;
            }
            const PercentRow p = percentages(r.row);
            out += r.image + ',' + p.false_pct.str() + ',' + p.drop_pct.str() + ',' + p.correct_pct.str() + '\n';
        }
    } else {
        wrong_kind(kind);
    }
    return out;
}

std::string emit_report(ReportKind kind, std::span<const Fig2ReportRow> rows) {
    if (kind != ReportKind::Fig2)
        wrong_kind(kind);
    std::string out = "image,poor_count,improved_count\n";
    for (const auto& r : rows)
        out += r.image + ',' + std::to_string(r.counts.poor) + ',' + std::to_string(r.counts.improved) + '\n';
    return out;
}

std::string emit_report(ReportKind kind, std::span<const Fig3ReportRow> rows) {
    if (kind != ReportKind::Fig3)
        wrong_kind(kind);
    std::string out = "image,input_density,filtered_density,enhanced_density,lined_density,shaped_density\n";
    for (const auto& r : rows) {
        if (r.profile.size() != 5)
            throw Error(Errc::ParamError, "fig3 rows need five densities");
        out += r.image;
        for (double v : r.profile)
            out += ',' + fixed(v, 6);
        out += '\n';
    }
    return out;
}

std::string emit_report(ReportKind kind, std::span<const TimingReportRow> rows) {
    std::string out;
    if (kind == ReportKind::Fig4) {
        out = "image,image_bytes,template_bytes,ratio\n";
        for (const auto& r : rows) {
            const double ratio = r.timing.template_bytes ? double(r.timing.image_bytes) / double(r.timing.template_bytes) : 0.0;
            out += r.image + ',' + std::to_string(r.timing.image_bytes) + ',' + std::to_string(r.timing.template_bytes) +
                   ',' + fixed(ratio, 1) + '\n';
        }
    } else if (kind == ReportKind::Fig5) {
        out = "image,full_pipeline_ms,template_match_ms,speedup\n";
        for (const auto& r : rows) {
            const double speedup =
                r.timing.template_match_ms > 0 ? r.timing.full_pipeline_ms / r.timing.template_match_ms : 0.0;
            out += r.image + ',' + fixed(r.timing.full_pipeline_ms, 3) + ',' + fixed(r.timing.template_match_ms, 3) +
                   ',' + fixed(speedup, 1) + '\n';
        }
    } else {
        wrong_kind(kind);
    }
    return out;
}

std::string ascii_chart(std::string_view title, std::span<const std::string> labels, std::span<const double> values,
                        int bar_width) {
    if (labels.size() != values.size())
        throw Error(Errc::ParamError, "chart needs one label per value");
    std::size_t label_width = 0;
    for (const auto& l : labels)
        label_width = std::max(label_width, l.size());
    double top = 0.0;
    for (double v : values)
        top = std::max(top, v);
    std::string out = std::string(title) + '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int len = top > 0 ? static_cast<int>(std::lround(bar_width * values[i] / top)) : 0;
        out += labels[i] + std::string(label_width - labels[i].size(), ' ') + " | " + std::string(len, '#') + ' ' +
               fixed(values[i], 2) + '\n';
    }
    return out;
}

}  // namespace afis
