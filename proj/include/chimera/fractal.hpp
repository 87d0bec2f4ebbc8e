#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "chimera/basin.hpp"

namespace chimera {

struct BoundaryGrid {
    int nx = 0, ny = 0;
    std::vector<uint8_t> cells; // [iy * nx + ix], 1 = boundary cell
    bool at(int ix, int iy) const {
        return cells[static_cast<size_t>(iy) * nx + ix] != 0;
    }
    size_t count() const;
};

// A cell is boundary iff its label differs from a 4-neighbor's. Sentinel (-1)
// cells are never boundary and never make a neighbor boundary.
BoundaryGrid extract_boundary(const BasinMap& bm);

struct BoxScale {
    int epsilon = 0; // box side, in cells
    size_t count = 0;
};

struct BoxCountResult {
    std::vector<BoxScale> scales;
    double d_box = std::numeric_limits<double>::quiet_NaN();
    double fit_intercept = std::numeric_limits<double>::quiet_NaN();
    double fit_r2 = std::numeric_limits<double>::quiet_NaN();
    // Saturation guards actually applied by the fit.
    int window_min_eps = 0, window_max_eps = 0;
};

// Powers of two 1, 2, 4, ... up to min(nx, ny)/2.
std::vector<int> default_box_scales(int nx, int ny);

// Boxes of an origin-anchored epsilon mesh (ragged edges allowed) holding at
// least one boundary cell, for each requested scale.
BoxCountResult box_count(const BoundaryGrid& bg, const std::vector<int>& scales);

// OLS slope of ln N against ln(1/eps) over scales with eps >= 2 and N >= 8.
BoxCountResult fit_box_dimension(BoxCountResult counts);

struct UncertaintyResult {
    std::vector<double> epsilons; // in axis1 slice units
    std::vector<double> uncertain_fraction;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double implied_dimension = std::numeric_limits<double>::quiet_NaN(); // 2 - alpha
    bool fit_ok = false;
};

// Geometric ladder h1 * {1, 2, 4, ...} capped at a quarter of the axis1 extent.
std::vector<double> default_uncertainty_epsilons(const SliceSpec& slice);

// For each epsilon, the fraction of seeded random cell pairs offset by epsilon
// along axis1 whose labels differ; alpha is the ln(fraction) vs ln(epsilon)
// slope. Pairs touching sentinel cells are excluded.
UncertaintyResult uncertainty_exponent(const BasinMap& bm, const SliceSpec& slice,
                                       const std::vector<double>& epsilons, int n_pairs,
                                       uint64_t seed);

} // namespace chimera
