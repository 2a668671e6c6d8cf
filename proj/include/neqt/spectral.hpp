#pragma once

#include <vector>

#include "neqt/leads.hpp"
#include "neqt/model.hpp"

namespace neqt {

struct SelfEnergy {
    double E = 0.0;
    CMatrix matrix;
};

struct SampleResolvent {
    double E = 0.0;
    CMatrix matrix;
    double condition_number = 0.0;
    double sigma_min = 0.0;
};

/// v_S(E, v) = sum_j d_j^2 g_j(E, v_j) |phi_j><phi_j|.
SelfEnergy embedding_self_energy(const SystemConfig& config, double E);

/// 1e-8 ||h_S|| + 1e-12
double singular_tolerance(const SystemConfig& config);

/// m_v(E) = (h_S + v_S(E, v) - E)^{-1}; throws SingularMatrix below singular_tolerance.
SampleResolvent sample_resolvent(const SystemConfig& config, double E);

/// Precomputed sample-space data used by the energy integrands.
class Embedding {
public:
    explicit Embedding(const SystemConfig& config);

    [[nodiscard]] const SystemConfig& config() const { return config_; }
    [[nodiscard]] int n() const { return config_.n_sites(); }
    [[nodiscard]] int m() const { return config_.n_leads(); }
    [[nodiscard]] const CMatrix& contacts() const { return phi_; } // n x m, columns phi_j

    /// h_S + v_S(E) - E
    [[nodiscard]] CMatrix kernel(double E) const;
    /// m_v(E) phi_j as columns (n x m); LU solve, SingularMatrix when ill-conditioned.
    [[nodiscard]] CMatrix resolvent_on_contacts(double E) const;
    [[nodiscard]] CMatrix resolvent(double E) const;

private:
    SystemConfig config_;
    CMatrix phi_;
    double singular_tol_;
};

struct ScanSpec {
    int grid_points = 2048;
    double refine_tol = 1e-10;
    double margin = -1.0; // negative: 4 c_R + ||h_S||
};

struct SpectralViolationPoint {
    double E = 0.0;
    double sigma_min = 0.0;
};

struct SpectralReport {
    bool passed = true;
    std::vector<SpectralViolationPoint> violations;
    double E_lo = 0.0;
    double E_hi = 0.0;
    int grid_points = 0;
    int refined_candidates = 0;
    double refine_tol = 0.0;
    double singular_tol = 0.0;
    double grid_sigma_min = 0.0; // smallest singular value seen anywhere
};

double smallest_singular_value(const SystemConfig& config, double E);

SpectralReport check_spectral_condition(const SystemConfig& config, const ScanSpec& scan = {});

} // namespace neqt
