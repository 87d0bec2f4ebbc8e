#include "chimera/fractal.hpp"

#include <algorithm>
#include <cmath>

#include "chimera/error.hpp"
#include "chimera/rng.hpp"

namespace chimera {

size_t BoundaryGrid::count() const {
    return static_cast<size_t>(std::count(cells.begin(), cells.end(), uint8_t{1}));
}

BoundaryGrid extract_boundary(const BasinMap& bm) {
    BoundaryGrid bg;
    bg.nx = bm.nx;
    bg.ny = bm.ny;
    bg.cells.assign(static_cast<size_t>(bm.nx) * bm.ny, 0);
    auto differs = [&](int label, int jx, int jy) {
        if (jx < 0 || jx >= bm.nx || jy < 0 || jy >= bm.ny) return false;
        const int other = bm.at(jx, jy);
        return other >= 0 && other != label;
    };
    for (int iy = 0; iy < bm.ny; ++iy)
        for (int ix = 0; ix < bm.nx; ++ix) {
            const int label = bm.at(ix, iy);
            if (label < 0) continue; // sentinel cells are outside the partition
            if (differs(label, ix - 1, iy) || differs(label, ix + 1, iy) ||
                differs(label, ix, iy - 1) || differs(label, ix, iy + 1))
                bg.cells[static_cast<size_t>(iy) * bm.nx + ix] = 1;
        }
    return bg;
}

std::vector<int> default_box_scales(int nx, int ny) {
    std::vector<int> scales;
    for (int e = 1; e <= std::min(nx, ny) / 2; e *= 2) scales.push_back(e);
    return scales;
}

BoxCountResult box_count(const BoundaryGrid& bg, const std::vector<int>& scales) {
    if (scales.empty()) throw ArgumentError("box_count: no scales given");
    const int cap = std::min(bg.nx, bg.ny) / 2;
    for (int e : scales)
        if (e < 1 || e > cap)
            throw ArgumentError("box_count: scales must lie in [1, min(nx,ny)/2]");
    if (bg.count() == 0)
        throw EmptyBoundaryError("box_count: empty boundary has no dimension");

    BoxCountResult res;
    for (int e : scales) {
        const int bx = (bg.nx + e - 1) / e;
        const int by = (bg.ny + e - 1) / e;
        std::vector<uint8_t> hit(static_cast<size_t>(bx) * by, 0);
        for (int iy = 0; iy < bg.ny; ++iy)
            for (int ix = 0; ix < bg.nx; ++ix)
                if (bg.at(ix, iy)) hit[static_cast<size_t>(iy / e) * bx + ix / e] = 1;
        res.scales.push_back(
            {e, static_cast<size_t>(std::count(hit.begin(), hit.end(), uint8_t{1}))});
    }
    return res;
}

namespace {

struct OlsFit {
    double slope = 0.0, intercept = 0.0, r2 = 1.0;
};

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

} // namespace

BoxCountResult fit_box_dimension(BoxCountResult counts) {
    std::vector<double> x, y;
    int emin = 0, emax = 0;
    for (const BoxScale& s : counts.scales) {
        if (s.epsilon < 2 || s.count < 8) continue; // saturation guards
        x.push_back(-std::log(static_cast<double>(s.epsilon)));
        y.push_back(std::log(static_cast<double>(s.count)));
        emin = emin == 0 ? s.epsilon : std::min(emin, s.epsilon);
        emax = std::max(emax, s.epsilon);
    }
    if (x.size() < 3)
        throw InsufficientScalesError(
            "fit_box_dimension: fewer than 3 usable scales after saturation guards");
    const OlsFit fit = ols(x, y);
    counts.d_box = fit.slope;
    counts.fit_intercept = fit.intercept;
    counts.fit_r2 = fit.r2;
    counts.window_min_eps = emin;
    counts.window_max_eps = emax;
    return counts;
}

std::vector<double> default_uncertainty_epsilons(const SliceSpec& slice) {
    const double h1 = (slice.max1 - slice.min1) / (slice.nx - 1);
    const double cap = (slice.max1 - slice.min1) / 4.0;
    std::vector<double> eps;
    for (double e = h1; e <= cap; e *= 2.0) eps.push_back(e);
    return eps;
}

UncertaintyResult uncertainty_exponent(const BasinMap& bm, const SliceSpec& slice,
                                       const std::vector<double>& epsilons, int n_pairs,
                                       uint64_t seed) {
    if (n_pairs < 1000) throw ArgumentError("uncertainty_exponent: need n_pairs >= 1000");
    if (epsilons.empty()) throw ArgumentError("uncertainty_exponent: no epsilons given");
    if (bm.nx != slice.nx || bm.ny != slice.ny)
        throw ArgumentError("uncertainty_exponent: map does not match the slice");
    const double extent = slice.max1 - slice.min1;
    const double h1 = extent / (slice.nx - 1);
    for (double e : epsilons)
        if (!(e > 0.0) || e > extent)
            throw ArgumentError("uncertainty_exponent: epsilons must lie in (0, extent]");

    UncertaintyResult res;
    res.epsilons = epsilons;
    Rng rng(seed);
    for (double e : epsilons) {
        const int d = std::max(1, static_cast<int>(std::llround(e / h1)));
        size_t differ = 0, usable = 0;
        for (int p = 0; p < n_pairs; ++p) {
            const int ix = static_cast<int>(rng.below(static_cast<uint64_t>(bm.nx - d)));
            const int iy = static_cast<int>(rng.below(static_cast<uint64_t>(bm.ny)));
            const int a = bm.at(ix, iy);
            const int b = bm.at(ix + d, iy);
            if (a < 0 || b < 0) continue;
            ++usable;
            if (a != b) ++differ;
        }
        res.uncertain_fraction.push_back(
            usable ? static_cast<double>(differ) / usable : 0.0);
    }

    std::vector<double> x, y;
    for (size_t i = 0; i < epsilons.size(); ++i)
        if (res.uncertain_fraction[i] > 0.0) {
            x.push_back(std::log(epsilons[i]));
            y.push_back(std::log(res.uncertain_fraction[i]));
        }
    if (x.size() >= 2) {
        const OlsFit fit = ols(x, y);
        res.alpha = fit.slope;
        res.implied_dimension = 2.0 - fit.slope;
        res.fit_ok = true;
    }
    return res;
}

} // namespace chimera
