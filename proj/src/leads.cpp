#include "neqt/leads.hpp"

#include <algorithm>
#include <cmath>

namespace neqt {

BandPoint band_point(double E, double v, double c)
{
    double u = (E - v) / (2.0 * c);
    if (std::abs(u) <= 1.0 + 1e-15) {
        u = std::clamp(u, -1.0, 1.0);
        return {BandSide::inside, std::acos(u), 0.0};
    }
    return {u > 0 ? BandSide::above : BandSide::below, 0.0, std::acosh(std::abs(u))};
}

cplx surface_green(double E, double v, double c)
{
    const auto p = band_point(E, v, c);
    switch (p.side) {
    case BandSide::inside: return std::polar(1.0 / c, -p.theta);
    case BandSide::above: return {std::exp(-p.chi) / c, 0.0};
    case BandSide::below: return {-std::exp(-p.chi) / c, 0.0};
    }
    return {};
}

double spectral_factor(double E, double c)
{
    const double u = E / (2.0 * c);
    if (std::abs(u) >= 1.0) return 0.0;
    return std::sqrt(2.0 / (pi * c * c) * (1.0 - u * u));
}

// With lambda = -c g the entry is lambda^{|x-y|+1} (1 + lambda^2 + ... + lambda^{2 min(x,y)}) / c,
// which stays finite at the thresholds where lambda^2 = 1.
cplx lead_resolvent_entry(int x, int y, double E, double v, double c)
{
    if (x < 0 || y < 0) throw std::invalid_argument("lead site index must be >= 0");
    const cplx lambda = -c * surface_green(E, v, c);
    const cplx lambda2 = lambda * lambda;
    const int k = std::min(x, y) + 1;
    cplx series;
    if (k <= 64 || std::abs(1.0 - lambda2) < 1e-6) {
        cplx term = 1.0;
        for (int i = 0; i < k; ++i) {
            series += term;
            term *= lambda2;
        }
    } else {
        series = (1.0 - std::pow(lambda2, k)) / (1.0 - lambda2);
    }
    return std::pow(lambda, std::abs(x - y) + 1) * series / c;
}

std::pair<double, double> BandGeometry::overlap(int j, int k) const
{
    return {std::max(bands.at(j).first, bands.at(k).first), std::min(bands.at(j).second, bands.at(k).second)};
}

bool BandGeometry::in_band(int j, double E) const
{
    return E >= bands.at(j).first && E <= bands.at(j).second;
}

BandGeometry band_geometry(const SystemConfig& config)
{
    BandGeometry geo;
    geo.half_width = 2.0 * config.hopping;
    for (const auto& lead : config.leads) {
        geo.bands.emplace_back(lead.bias - geo.half_width, lead.bias + geo.half_width);
        geo.thresholds.push_back(lead.bias - geo.half_width);
        geo.thresholds.push_back(lead.bias + geo.half_width);
    }
    std::sort(geo.thresholds.begin(), geo.thresholds.end());
    geo.thresholds.erase(std::unique(geo.thresholds.begin(), geo.thresholds.end()), geo.thresholds.end());
    return geo;
}

} // namespace neqt
