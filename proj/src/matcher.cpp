#include "afis/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <tuple>

#include "afis/error.hpp"

namespace afis {

void MatchConfig::validate() const {
    if (distance_tolerance < 0)
        throw Error(Errc::InvalidArgument, "distance tolerance must be >= 0");
    if (!(signature_fraction > 0.0 && signature_fraction <= 1.0))
        throw Error(Errc::InvalidArgument, "signature fraction must be in (0,1]");
    if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0))
        throw Error(Errc::InvalidArgument, "decision threshold must be in [0,1]");
}

std::vector<std::int64_t> point_signature(const Template& t, std::size_t i) {
    if (i >= t.minutiae.size())
        throw Error(Errc::IndexOutOfRange, "point index " + std::to_string(i) + " out of range");
    std::vector<std::int64_t> sig;
    sig.reserve(t.minutiae.size() ? t.minutiae.size() - 1 : 0);
    for (const Correlation& c : t.correlations)
        if (c.i == i || c.j == i)
            sig.push_back(c.distance);
    std::sort(sig.begin(), sig.end());
    return sig;
}

std::size_t signature_overlap(const std::vector<std::int64_t>& s1, const std::vector<std::int64_t>& s2,
                              std::int64_t tolerance) {
    std::size_t i = 0, j = 0, pairs = 0;
    while (i < s1.size() && j < s2.size()) {
        const std::int64_t gap = s1[i] - s2[j];
        if (gap >= -tolerance && gap <= tolerance) {
            ++pairs;
            ++i;
            ++j;
        } else if (gap < 0) {
            ++i;
        } else {
            ++j;
        }
    }
    return pairs;
}

Decision decide(double eq, double threshold) { return eq >= threshold ? Decision::Accept : Decision::Reject; }

namespace {

// Signatures for every point, read from the stored correlation list in one pass.
std::vector<std::vector<std::int64_t>> all_signatures(const Template& t) {
    std::vector<std::vector<std::int64_t>> sigs(t.minutiae.size());
    for (const Correlation& c : t.correlations) {
        sigs[c.i].push_back(c.distance);
        sigs[c.j].push_back(c.distance);
    }
    for (auto& s : sigs)
        std::sort(s.begin(), s.end());
    return sigs;
}

bool template_less(const Template& a, const Template& b) {
    auto key = [](const Minutia& m) { return std::tie(m.y, m.x, m.kind); };
    if (a.width != b.width || a.height != b.height)
        return std::tie(a.width, a.height) < std::tie(b.width, b.height);
    return std::lexicographical_compare(a.minutiae.begin(), a.minutiae.end(), b.minutiae.begin(), b.minutiae.end(),
                                        [&](const Minutia& l, const Minutia& r) { return key(l) < key(r); });
}

struct Candidate {
    std::size_t overlap;
    std::uint32_t i, j;
};

}  // namespace

MatchResult match_templates(const Template& a, const Template& b, const MatchConfig& cfg) {
    cfg.validate();
    if (a.mode != b.mode)
        throw Error(Errc::ModeMismatch, "templates use different distance modes");

    MatchResult r;
    r.n_a = a.size();
    r.n_b = b.size();
    r.width_mismatch = a.width != b.width;

    // The greedy pass runs in one fixed orientation so the score does not
    // depend on argument order.
    const bool swapped = template_less(b, a);
    const Template& first = swapped ? b : a;
    const Template& second = swapped ? a : b;

    const std::size_t smaller = std::min(first.size(), second.size());
    if (smaller > 0) {
        const auto sig1 = all_signatures(first);
        const auto sig2 = all_signatures(second);
        const auto need = static_cast<std::size_t>(std::ceil(cfg.signature_fraction * double(smaller - 1) - 1e-12));

        std::vector<Candidate> cands;
        for (std::uint32_t i = 0; i < sig1.size(); ++i)
            for (std::uint32_t j = 0; j < sig2.size(); ++j) {
                const std::size_t ov = signature_overlap(sig1[i], sig2[j], cfg.distance_tolerance);
                if (ov >= need)
                    cands.push_back({ov, i, j});
            }
        std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& rr) {
            if (l.overlap != rr.overlap)
                return l.overlap > rr.overlap;
            return std::tie(l.i, l.j) < std::tie(rr.i, rr.j);
        });

        // Greedy pass, then augmenting paths up to a maximum pairing so that
        // admitting more candidates can never lower the count.
        constexpr std::uint32_t kFree = UINT32_MAX;
        std::vector<std::uint32_t> mate1(first.size(), kFree), mate2(second.size(), kFree);
        std::vector<std::vector<std::uint32_t>> adj(first.size());
        for (const Candidate& c : cands) {
            adj[c.i].push_back(c.j);
            if (mate1[c.i] == kFree && mate2[c.j] == kFree) {
                mate1[c.i] = c.j;
                mate2[c.j] = c.i;
            }
        }
        std::vector<std::uint32_t> seen(second.size(), kFree);
        std::function<bool(std::uint32_t, std::uint32_t)> augment = [&](std::uint32_t u, std::uint32_t round) {
            for (std::uint32_t v : adj[u]) {
                if (seen[v] == round)
                    continue;
                seen[v] = round;
                if (mate2[v] == kFree || augment(mate2[v], round)) {
                    mate1[u] = v;
                    mate2[v] = u;
                    return true;
                }
            }
            return false;
        };
        for (std::uint32_t u = 0; u < first.size(); ++u)
            if (mate1[u] == kFree && !adj[u].empty())
                augment(u, u);
        for (std::uint32_t u = 0; u < first.size(); ++u)
            if (mate1[u] != kFree)
                r.pairs.emplace_back(u, mate1[u]);
        if (swapped)
            for (auto& p : r.pairs)
                std::swap(p.first, p.second);
        std::sort(r.pairs.begin(), r.pairs.end());
    }

    r.matched = r.pairs.size();
    const std::size_t greater = std::max(r.n_a, r.n_b);
    r.eq = greater == 0 ? 1.0 : double(r.matched) / double(greater);
    r.decision = decide(r.eq, cfg.decision_threshold);
    return r;
}

std::string match_csv_header() { return "n_a,n_b,matched,eq,decision"; }

std::string match_csv_row(const MatchResult& r) {
    char eq[32];
    std::snprintf(eq, sizeof eq, "%.6f", r.eq);
    return std::to_string(r.n_a) + ',' + std::to_string(r.n_b) + ',' + std::to_string(r.matched) + ',' + eq + ',' +
           (r.decision == Decision::Accept ? "accept" : "reject");
}

}  // namespace afis
