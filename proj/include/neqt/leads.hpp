#pragma once

#include <utility>
#include <vector>

#include "neqt/model.hpp"

namespace neqt {

/// Position of an energy relative to the band [v - 2c, v + 2c] of a lead.
enum class BandSide { below, inside, above };

/// Angle parametrization of E - v: 2c cos(theta) in band, +-2c cosh(chi) outside.
struct BandPoint {
    BandSide side;
    double theta = 0.0; // in [0, pi] when inside
    double chi = 0.0;   // >= 0 when outside
};

BandPoint band_point(double E, double v, double c);

/// g_j(E, v): minus the boundary value of the contact-site resolvent.
cplx surface_green(double E, double v, double c);

/// r(E) = sqrt(2/(pi c^2) (1 - (E/2c)^2)) in band, 0 outside.
double spectral_factor(double E, double c);

/// <delta_x|(h_j + v - E - i0)^{-1} delta_y> for the Dirichlet chain with hopping -c.
cplx lead_resolvent_entry(int x, int y, double E, double v, double c);

struct BandGeometry {
    double half_width = 0.0;          // 2 c_R
    std::vector<double> thresholds;   // sorted, duplicates removed
    std::vector<std::pair<double, double>> bands;

    /// I_{j,k}; empty pair (lo > hi) when the bands do not overlap.
    [[nodiscard]] std::pair<double, double> overlap(int j, int k) const;
    [[nodiscard]] bool in_band(int j, double E) const;
};

BandGeometry band_geometry(const SystemConfig& config);

} // namespace neqt
