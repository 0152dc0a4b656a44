#include <algorithm>
#include <unordered_set>

#include "gbid/error.hpp"
#include "gbid/moea.hpp"

namespace gbid {

namespace {

double hypervolume2(std::vector<std::pair<double, double>> pts, double ref_y, double ref_z) {
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double level = ref_z;
    for (const auto& [y, z] : pts) {
        if (z < level) {
            area += (ref_y - y) * (level - z);
            level = z;
        }
    }
    return area;
}

}  // namespace

std::vector<ObjectiveVector> ParetoArchive::objectives() const {
    std::vector<ObjectiveVector> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.objectives);
    return out;
}

ParetoArchive accumulate(std::span<const std::vector<FrontEntry>> fronts) {
    std::vector<ArchiveEntry> pooled;
    std::unordered_set<Genome, GenomeHash> seen;
    for (std::size_t run = 0; run < fronts.size(); ++run)
        for (const auto& e : fronts[run])
            if (seen.insert(e.genome).second) pooled.push_back({e.genome, e.objectives, run});

    const bool any_feasible =
        std::any_of(pooled.begin(), pooled.end(), [](const ArchiveEntry& e) { return !e.objectives.penalized(); });
    if (any_feasible)
        pooled.erase(std::remove_if(pooled.begin(), pooled.end(),
                                    [](const ArchiveEntry& e) { return e.objectives.penalized(); }),
                     pooled.end());

    std::vector<ObjectiveVector> objs;
    objs.reserve(pooled.size());
    for (const auto& e : pooled) objs.push_back(e.objectives);
    ParetoArchive archive;
    for (auto i : non_dominated_indices(objs)) archive.entries.push_back(pooled[i]);
    std::sort(archive.entries.begin(), archive.entries.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
        const auto va = a.objectives.values();
        const auto vb = b.objectives.values();
        if (va != vb) return va < vb;
        return a.genome < b.genome;
    });
    return archive;
}

ParetoArchive accumulate(std::span<const RunResult> runs) {
    std::vector<std::vector<FrontEntry>> fronts;
    fronts.reserve(runs.size());
    for (const auto& r : runs) fronts.push_back(r.front);
    return accumulate(std::span<const std::vector<FrontEntry>>(fronts));
}

double set_coverage(std::span<const ObjectiveVector> a, std::span<const ObjectiveVector> b) {
    if (b.empty()) throw Error(Errc::InvalidArgument, "set coverage needs a non-empty second set");
    std::size_t covered = 0;
    for (const auto& vb : b)
        if (std::any_of(a.begin(), a.end(), [&](const ObjectiveVector& va) { return weakly_dominates(va, vb); }))
            ++covered;
    return static_cast<double>(covered) / static_cast<double>(b.size());
}

double set_coverage(const ParetoArchive& a, const ParetoArchive& b) {
    const auto oa = a.objectives();
    const auto ob = b.objectives();
    return set_coverage(oa, ob);
}

double hypervolume3(std::span<const std::array<double, 3>> points, const std::array<double, 3>& reference) {
    std::vector<std::array<double, 3>> pts;
    for (const auto& p : points)
        if (p[0] < reference[0] && p[1] < reference[1] && p[2] < reference[2]) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    double volume = 0.0;
    std::vector<std::pair<double, double>> slab;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slab.emplace_back(pts[i][1], pts[i][2]);
        const double next = i + 1 < pts.size() ? pts[i + 1][0] : reference[0];
        if (next > pts[i][0]) volume += (next - pts[i][0]) * hypervolume2(slab, reference[1], reference[2]);
    }
    return volume;
}

}  // namespace gbid
