#pragma once

#include <vector>

#include "neqt/quadrature.hpp"
#include "neqt/spectral.hpp"

namespace neqt {

/// Fermi function f(x) = 1 / (1 + e^x), evaluated without overflow.
double fermi(double x);

struct TransmissionMatrix {
    double E = 0.0;
    RMatrix T; // zero diagonal
};

TransmissionMatrix transmission(const SystemConfig& config, double E);
RMatrix transmission_matrix(const Embedding& emb, double E);

struct SteadyObservables {
    RVector J;     // charge current into the sample from each lead
    RVector Eflux; // energy current
    double sigma = 0.0;
    RVector J_error;
    RVector Eflux_error;
    int evaluations = 0;
};

/// Energies where the integrands lose smoothness: band thresholds and Fermi points.
std::vector<double> integration_breakpoints(const SystemConfig& config);

SteadyObservables lb_currents(const SystemConfig& config, const QuadratureSpec& spec = {});

/// -sum_j beta_j (E_j - mu_j J_j)
double entropy_from_currents(const SystemConfig& config, const RVector& J, const RVector& Eflux);

struct EntropyReport {
    double sigma = 0.0;
    bool strictly_positive = false; // criterion on T_jk and the thermodynamic forces
    SteadyObservables currents;
};

/// Whether T_jk vanishes identically on I_{j,k}, sampled on a grid.
bool transmission_vanishes(const SystemConfig& config, int j, int k, int samples = 129, double threshold = 1e-12);

EntropyReport entropy_production(const SystemConfig& config, const QuadratureSpec& spec = {});

struct OnsagerMatrix {
    RMatrix L;
    double step = 0.0;
    double richardson_change = 0.0; // max |L(h) - L(h/2)|
};

/// L_jk = (1/beta) dJ_j/dmu_k at equilibrium by central differences.
OnsagerMatrix onsager_matrix(const SystemConfig& config, double step = -1.0, const QuadratureSpec& spec = {});

} // namespace neqt
