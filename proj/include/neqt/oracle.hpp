#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neqt/model.hpp"

namespace neqt {

/// chi(s): 1 for s <= 0, 0 for s >= 1. The switch parameter at elapsed time
/// tau of a ramp of duration T is chi(1 - tau / T).
enum class RampProfile { sudden, linear, smooth };

double ramp_profile(RampProfile profile, double s);
RampProfile parse_ramp_profile(const std::string& name);
std::string to_string(RampProfile profile);

enum class SampleState { half, empty, full, random, custom };
SampleState parse_sample_state(const std::string& name);

struct OracleConfig {
    int lead_length = 400;
    double t_max = -1.0; // negative: end of the plateau window
    double dt = 0.5;     // sampling interval of the recorded series
    RampProfile ramp = RampProfile::sudden;
    double ramp_duration = 0.0; // |t0|
    double ramp_step = 0.5;     // propagation step while the Hamiltonian changes
    bool enforce_recurrence = true;
    SampleState sample_state = SampleState::half;
    CMatrix sample_density; // used with SampleState::custom
    std::uint64_t seed = 0;
    double window_lo = 0.5; // plateau window as fractions of the recurrence time
    double window_hi = 0.9;
};

struct Plateau {
    double value = 0.0;
    double slope = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int samples = 0;
    bool accepted = false;
};

/// Least-squares constant and slope over samples with t in [t_lo, t_hi].
Plateau fit_plateau(const std::vector<double>& times, const RVector& series, double t_lo, double t_hi);

struct OracleRun {
    std::vector<double> times; // elapsed since the protocol start t0
    RMatrix charge;            // rows: times, columns: leads
    RMatrix energy;
    RMatrix density; // rows: times, columns: sample sites
    std::vector<Plateau> charge_plateaus;
    std::vector<Plateau> energy_plateaus;
    double t_rec = 0.0;    // L / c_R
    double ramp_end = 0.0; // elapsed time when the Hamiltonian stops changing
    double particle_drift = 0.0;
    double hermiticity_error = 0.0;

    [[nodiscard]] bool plateaus_accepted() const;
};

/// Sample block of the initial state for the partitioned scenario.
CMatrix sample_initial_density(int n, const OracleConfig& oc);

/// One-particle evolution of the finite truncation, sudden switch at t0.
OracleRun evolve_free(const SystemConfig& config, const OracleConfig& oc);

/// Many-body exact evolution; n + m L <= 14.
OracleRun evolve_interacting(const SystemConfig& config, const OracleConfig& oc);

/// Ramped coupling (partitioned) or ramped bias (partition-free); dispatches on xi.
OracleRun evolve_adiabatic(const SystemConfig& config, const OracleConfig& oc);

/// Time-dependent one-shot mean field on the finite truncation: the potential at
/// time t is built from the xi = 0 trajectory. Partitioned scenario only.
OracleRun evolve_hartree_fock_td(const SystemConfig& config, const OracleConfig& oc, double step = 0.01);

struct IndependenceReport {
    std::vector<std::vector<Plateau>> plateaus; // per sample state, per lead
    double spread = 0.0; // max over leads of (max - min) / |mean|
};

IndependenceReport initial_state_independence(const SystemConfig& config, const OracleConfig& oc,
                                              const std::vector<CMatrix>& sample_states);

inline constexpr int max_many_body_sites = 14;

} // namespace neqt
