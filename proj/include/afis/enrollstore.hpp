#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afis/matcher.hpp"
#include "afis/preprocess.hpp"
#include "afis/raster.hpp"
#include "afis/template.hpp"

namespace afis {

/// [A-Za-z0-9_-]{1,64}; doubles as the template file stem.
class SubjectId {
public:
    explicit SubjectId(std::string id);

    const std::string& str() const noexcept { return id_; }
    static bool is_valid(std::string_view id) noexcept;
    bool operator==(const SubjectId&) const = default;

private:
    std::string id_;
};

/// Everything needed to turn an image into a template.
struct EnrollConfig {
    PreprocessConfig preprocess;
    double region_fraction = kDefaultRegionFraction;
    DistanceMode mode = DistanceMode::PaperFaithful;
};

struct EnrollmentRecord {
    std::string subject;
    std::string template_path;  // store-relative
    std::string created;        // ISO-8601 UTC, seconds
    std::uintmax_t source_image_bytes = 0;
    std::uintmax_t template_bytes = 0;
    EnrollConfig config;
};

/// Image -> pipeline -> line-stage minutiae -> region clip -> template.
Template make_template(const RasterImage& img, const EnrollConfig& cfg);

/// Directory of <id>.aft files plus index.tsv. Mutations hold store.lock.
class EnrollStore {
public:
    explicit EnrollStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    /// source_bytes defaults to the P3 encoding size of img.
    EnrollmentRecord enroll(const SubjectId& id, const RasterImage& img, const EnrollConfig& cfg,
                            bool overwrite = false, std::optional<std::uintmax_t> source_bytes = {});

    /// Replays the enrollment configuration recorded for the subject.
    MatchResult verify(const SubjectId& id, const RasterImage& probe, const MatchConfig& cfg) const;

    std::vector<EnrollmentRecord> list_subjects() const;
    bool delete_subject(const SubjectId& id);

    Template load_template(const SubjectId& id) const;

private:
    std::vector<EnrollmentRecord> read_index() const;
    void write_index(const std::vector<EnrollmentRecord>& rows) const;

    std::filesystem::path dir_;
};

/// RAII holder of <dir>/store.lock, created exclusively.
class StoreLock {
public:
    explicit StoreLock(const std::filesystem::path& dir);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Writes to a sibling temporary then renames over path.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

}  // namespace afis
