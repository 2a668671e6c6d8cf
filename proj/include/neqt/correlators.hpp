#pragma once

#include <string>
#include <vector>

#include "neqt/quadrature.hpp"
#include "neqt/spectral.hpp"

namespace neqt {

/// A site of the infinite system: sample site (lead = -1) or site `index` of lead `lead`.
struct Site {
    int lead = -1;
    int index = 0;

    static Site sample(int x) { return {-1, x}; }
    static Site on_lead(int j, int x) { return {j, x}; }
    [[nodiscard]] bool in_sample() const { return lead < 0; }
    bool operator==(const Site&) const = default;
};

/// Sample sites followed by the first `lead_sites` sites of every lead.
std::vector<Site> standard_sites(const SystemConfig& config, int lead_sites);

/// Constant in front of the two-point integral over d_j^2 f r |m phi_j><m phi_j| dE.
inline const std::string density_normalization = "1/sqrt(2*pi)";

struct CorrelationMatrix {
    std::vector<Site> sites;
    CMatrix values; // values(a, b) = <a^dagger_{sites[b]} a_{sites[a]}>
    double error = 0.0;
};

/// Stationary scattering states psi_{j,E}(x) on the requested sites, one column
/// per lead; columns of leads whose band excludes E are zero.
CMatrix scattering_states(const Embedding& emb, double E, const std::vector<Site>& sites);

CorrelationMatrix ness_density_matrix(const SystemConfig& config, const std::vector<Site>& sites,
                                      const QuadratureSpec& spec = {});

struct GreenValues {
    cplx lesser, greater, retarded, advanced;
};

/// The four Green-Keldysh functions at time t with s = 0.
GreenValues green_functions(const SystemConfig& config, double t, const Site& x, const Site& y,
                            const QuadratureSpec& spec = {});

enum class GreenKind { lesser, greater, retarded, advanced };

struct GreensFunction {
    Site x, y;
    std::vector<double> times;
    std::vector<cplx> lesser, greater, retarded, advanced;

    [[nodiscard]] const std::vector<cplx>& values(GreenKind kind) const;
};

/// All times share one energy integration with panels no wider than pi / max|t|.
GreensFunction green_time_series(const SystemConfig& config, const std::vector<double>& times, const Site& x,
                                 const Site& y, const QuadratureSpec& spec = {});

/// Transform of G^< taken from the spectral integrand: 2i sum_j f_j(w) psi_j(w;x) psi_j(w;y)^*.
std::vector<cplx> fourier_lesser(const SystemConfig& config, const std::vector<double>& omegas, const Site& x,
                                 const Site& y);

struct FourierSamples {
    std::vector<double> omegas;
    std::vector<cplx> values;
    double window_lo = 0.0, window_hi = 0.0;
    double edge_ratio = 0.0; // max |G| at the window ends relative to the peak
};

/// Trapezoidal approximation of int G(t) e^{-i t w} dt on a uniform time grid.
FourierSamples fourier_transform(const std::vector<double>& times, const std::vector<cplx>& values,
                                 const std::vector<double>& omegas, double decay_threshold = 1e-6);

/// (1/2 pi) int G(w) e^{i t w} dw by the trapezoidal rule on a uniform grid.
std::vector<cplx> inverse_fourier_transform(const std::vector<double>& omegas, const std::vector<cplx>& values,
                                            const std::vector<double>& times);

/// j_j = -2 d_j Re sum_x G^<(0; 0_j, x) phi_j(x)
double steady_current_from_lesser(const SystemConfig& config, int lead, const QuadratureSpec& spec = {});

} // namespace neqt
