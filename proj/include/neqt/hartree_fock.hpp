#pragma once

#include "neqt/correlators.hpp"

namespace neqt {

struct HartreeFockPotential {
    RMatrix v_H;  // diagonal
    CMatrix v_X;
    CMatrix v_HF; // v_H - v_X
    CMatrix density; // <a^dagger_y a_x> of the xi = 0 state on the sample
};

/// Hartree and exchange terms of the pair potential in a given sample density.
HartreeFockPotential potential_from_density(const RMatrix& w, const CMatrix& density);

/// One-shot potential from the non-interacting NESS.
HartreeFockPotential build_potential(const SystemConfig& config, const QuadratureSpec& spec = {});

/// Non-interacting config with sample Hamiltonian h_S + xi v_HF; SpectralViolation
/// when the shifted Hamiltonian fails the spectral condition.
SystemConfig hf_system(const SystemConfig& config, const QuadratureSpec& spec = {}, const ScanSpec& scan = {});

} // namespace neqt
