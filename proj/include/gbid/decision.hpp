#pragma once

#include <cstddef>
#include <vector>

#include "gbid/moea.hpp"

namespace gbid {

/// Decision-maker preference: objective rankings (1 = most preferred), ordered
/// (xi, E, E_static), and intensity on the 1..9 scale.
struct PreferenceSpec {
    std::vector<int> rankings;
    double intensity = 1.0;

    void validate() const;
};

struct WeightVector {
    std::vector<double> w;
};

/// tau[i][j] = I^((O_j - O_i) / (n_obj - 1)): how many times objective i outweighs j.
std::vector<std::vector<double>> preference_relations(const PreferenceSpec& pref);

/// Row geometric means of the preference relations, normalized to sum to one.
WeightVector priority_weights(const PreferenceSpec& pref);

struct RankedEntry {
    std::size_t index = 0;  // position in the archive
    double score = 0.0;     // Manhattan distance (MMD) or global rank (MTD)
};

struct Selection {
    std::size_t selected = 0;
    std::vector<RankedEntry> ranking;  // best first
};

/// Minimum Manhattan distance to the ideal point in min-max normalized objective space.
/// An objective with equal extremes contributes zero for every entry.
Selection mmd_select(const ParetoArchive& archive);

/// Multi-criteria tournament decision with the given priority weights.
/// Throws ArchiveTooSmall for fewer than two entries.
Selection mtd_select(const ParetoArchive& archive, const WeightVector& weights);

}  // namespace gbid
