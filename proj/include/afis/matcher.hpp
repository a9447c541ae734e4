#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afis/template.hpp"

namespace afis {

struct MatchConfig {
    std::int64_t distance_tolerance = 3;
    double signature_fraction = 0.5;
    double decision_threshold = 0.6;

    void validate() const;
};

enum class Decision : std::uint8_t { Reject, Accept };

struct MatchResult {
    std::size_t matched = 0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double eq = 0.0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    Decision decision = Decision::Reject;
    /// Set when the templates come from images of different widths; scanline
    /// distances scale with width, so the score is less meaningful.
    bool width_mismatch = false;
};

/// Distances from point i to every other point, ascending.
std::vector<std::int64_t> point_signature(const Template& t, std::size_t i);

/// Size of the largest one-to-one pairing of two ascending lists where
/// elements pair iff they differ by at most tolerance.
std::size_t signature_overlap(const std::vector<std::int64_t>& s1, const std::vector<std::int64_t>& s2,
                              std::int64_t tolerance);

Decision decide(double eq, double threshold);

/// EQ = matched / max(n_a, n_b); two empty templates score 1. Throws
/// ModeMismatch when the templates use different distance modes.
MatchResult match_templates(const Template& a, const Template& b, const MatchConfig& cfg);

/// "n_a,n_b,matched,eq,decision"
std::string match_csv_header();
std::string match_csv_row(const MatchResult& r);

}  // namespace afis
