#include "chimera/render.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "chimera/error.hpp"
#include "chimera/rng.hpp"

namespace chimera {

namespace {

std::array<uint8_t, 3> hsv_to_rgb(double h, double s, double v) {
    const double hh = (h - std::floor(h)) * 6.0;
    const int sector = static_cast<int>(hh) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r, g, b;
    switch (sector) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
    }
    auto byte = [](double x) { return static_cast<uint8_t>(std::lround(x * 255.0)); };
    return {byte(r), byte(g), byte(b)};
}

void write_ppm(const std::string& path, int w, int h, const std::vector<uint8_t>& rgb) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "P6\n" << w << " " << h << "\n255\n";
    f.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
    if (!f) throw IoError("write failed: " + path);
}

} // namespace

std::array<uint8_t, 3> palette_color(int label, uint64_t palette_seed) {
    if (label < 0) return {0, 0, 0};
    const double offset =
        static_cast<double>(splitmix64(palette_seed) >> 11) * 0x1.0p-53;
    const double hue = offset + 0.61803398874989485 * label;
    return hsv_to_rgb(hue - std::floor(hue), 0.65, 0.95);
}

void render_basin(const BasinMap& map, uint64_t palette_seed, const std::string& path) {
    std::vector<uint8_t> rgb(static_cast<size_t>(map.nx) * map.ny * 3);
    size_t o = 0;
    for (int iy = map.ny - 1; iy >= 0; --iy) // grid row 0 at the image bottom
        for (int ix = 0; ix < map.nx; ++ix) {
            const auto c = palette_color(map.at(ix, iy), palette_seed);
            rgb[o++] = c[0];
            rgb[o++] = c[1];
            rgb[o++] = c[2];
        }
    write_ppm(path, map.nx, map.ny, rgb);
}

void render_boundary(const BoundaryGrid& bg, const std::string& path) {
    std::vector<uint8_t> rgb(static_cast<size_t>(bg.nx) * bg.ny * 3);
    size_t o = 0;
    for (int iy = bg.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < bg.nx; ++ix) {
            const uint8_t v = bg.at(ix, iy) ? 255 : 0;
            rgb[o++] = v;
            rgb[o++] = v;
            rgb[o++] = v;
        }
    write_ppm(path, bg.nx, bg.ny, rgb);
}

} // namespace chimera
