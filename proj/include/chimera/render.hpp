#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "chimera/basin.hpp"
#include "chimera/fractal.hpp"

namespace chimera {

// Golden-ratio hue walk, deterministic in (label, palette_seed); label -1 is black.
std::array<uint8_t, 3> palette_color(int label, uint64_t palette_seed);

// Binary PPM (P6), one pixel per cell, grid row 0 at the bottom of the image
// (axis1 rightward, axis2 upward).
void render_basin(const BasinMap& map, uint64_t palette_seed, const std::string& path);

// Boundary cells white on black, same orientation.
void render_boundary(const BoundaryGrid& bg, const std::string& path);

} // namespace chimera
