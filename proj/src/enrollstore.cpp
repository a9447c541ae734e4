#include "afis/enrollstore.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>
#include <sstream>

#include "afis/error.hpp"

namespace afis {

namespace fs = std::filesystem;

SubjectId::SubjectId(std::string id) : id_(std::move(id)) {
    if (!is_valid(id_))
        throw Error(Errc::InvalidSubjectId, "subject id must match [A-Za-z0-9_-]{1,64}: '" + id_ + "'");
}

bool SubjectId::is_valid(std::string_view id) noexcept {
    if (id.empty() || id.size() > 64)
        return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

Template make_template(const RasterImage& img, const EnrollConfig& cfg) {
    cfg.preprocess.validate();
    const StageImages stages = run_pipeline(img, cfg.preprocess);
    const Region region = default_region(img.width(), img.height(), cfg.region_fraction);
    return build_template(clip_region(extract(stages[kLined]), region), img.width(), img.height(), region, cfg.mode);
}

void atomic_write(const fs::path& path, std::string_view bytes) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(rng() % 1000000000ULL);
    write_file(tmp.string(), bytes);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::IoError, "cannot rename into " + path.string());
    }
}

StoreLock::StoreLock(const fs::path& dir) : path_(dir / "store.lock") {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) {
        if (errno == EEXIST)
            throw Error(Errc::StoreLocked, "store is locked by another writer: " + path_.string());
        throw Error(Errc::IoError, "cannot create lock file " + path_.string());
    }
    std::fclose(f);
}

StoreLock::~StoreLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

namespace {

constexpr std::string_view kIndexName = "index.tsv";

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            return out;
        start = tab + 1;
    }
}

template <typename T>
T field(std::string_view s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::IoError, "corrupt index field '" + std::string(s) + "'");
    return v;
}

}  // namespace

EnrollStore::EnrollStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
        throw Error(Errc::IoError, "cannot use store directory " + dir_.string());
}

std::vector<EnrollmentRecord> EnrollStore::read_index() const {
    const fs::path path = dir_ / kIndexName;
    if (!fs::exists(path))
        return {};
    const std::string text = read_file(path.string());
    std::vector<EnrollmentRecord> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_tabs(line);
        if (f.size() != 9)
            throw Error(Errc::IoError, "corrupt index row: " + line);
        EnrollmentRecord r;
        r.subject = SubjectId(std::string(f[0])).str();
        r.template_path = r.subject + ".aft";
        r.created = std::string(f[1]);
        r.source_image_bytes = field<std::uintmax_t>(f[2]);
        r.template_bytes = field<std::uintmax_t>(f[3]);
        r.config.preprocess.threshold = field<int>(f[4]);
        r.config.preprocess.ridge_thickness = field<int>(f[5]);
        r.config.preprocess.shape_radius = field<int>(f[6]);
        r.config.region_fraction = field<double>(f[7]);
        r.config.mode = parse_mode(f[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void EnrollStore::write_index(const std::vector<EnrollmentRecord>& rows) const {
    std::string out;
    for (const EnrollmentRecord& r : rows) {
        out += r.subject + '\t' + r.created + '\t' + std::to_string(r.source_image_bytes) + '\t' +
               std::to_string(r.template_bytes) + '\t' + std::to_string(r.config.preprocess.threshold) + '\t' +
               std::to_string(r.config.preprocess.ridge_thickness) + '\t' +
               std::to_string(r.config.preprocess.shape_radius) + '\t' + format_double(r.config.region_fraction) +
               '\t' + std::string(mode_name(r.config.mode)) + '\n';
    }
    atomic_write(dir_ / kIndexName, out);
}

EnrollmentRecord EnrollStore::enroll(const SubjectId& id, const RasterImage& img, const EnrollConfig& cfg,
                                     bool overwrite, std::optional<std::uintmax_t> source_bytes) {
    StoreLock lock(dir_);
    auto rows = read_index();
    auto it = std::find_if(rows.begin(), rows.end(), [&](const EnrollmentRecord& r) { return r.subject == id.str(); });
    if (it != rows.end() && !overwrite)
        throw Error(Errc::DuplicateSubject, "subject '" + id.str() + "' is already enrolled");

    const std::string bytes = serialize(make_template(img, cfg));
    EnrollmentRecord rec;
    rec.subject = id.str();
    rec.template_path = id.str() + ".aft";
    rec.created = utc_now();
    rec.source_image_bytes = source_bytes ? *source_bytes : save_image(img, ImageFormat::P3).size();
    rec.template_bytes = bytes.size();
    rec.config = cfg;

    atomic_write(dir_ / rec.template_path, bytes);
    if (it != rows.end())
        *it = rec;
    else
        rows.push_back(rec);
    write_index(rows);
    return rec;
}

Template EnrollStore::load_template(const SubjectId& id) const {
    const fs::path path = dir_ / (id.str() + ".aft");
    if (!fs::exists(path))
        throw Error(Errc::UnknownSubject, "no template for subject '" + id.str() + "'");
    return parse(read_file(path.string()));
}

MatchResult EnrollStore::verify(const SubjectId& id, const RasterImage& probe, const MatchConfig& cfg) const {
    const auto rows = read_index();
    auto it = std::find_if(rows.begin(), rows.end(), [&](const EnrollmentRecord& r) { return r.subject == id.str(); });
    if (it == rows.end())
        throw Error(Errc::UnknownSubject, "subject '" + id.str() + "' is not enrolled");
    const Template stored = load_template(id);
    if (stored.mode != it->config.mode)
        throw Error(Errc::ModeMismatch, "stored template mode differs from the enrollment record");
    return match_templates(stored, make_template(probe, it->config), cfg);
}

std::vector<EnrollmentRecord> EnrollStore::list_subjects() const { return read_index(); }

bool EnrollStore::delete_subject(const SubjectId& id) {
    StoreLock lock(dir_);
    auto rows = read_index();
    auto it = std::find_if(rows.begin(), rows.end(), [&](const EnrollmentRecord& r) { return r.subject == id.str(); });
    if (it == rows.end())
        return false;
    std::error_code ec;
    fs::remove(dir_ / it->template_path, ec);
    if (ec)
        throw Error(Errc::IoError, "cannot remove " + it->template_path);
    rows.erase(it);
    write_index(rows);
    return true;
}

}  // namespace afis
