#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "neqt/errors.hpp"

namespace neqt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using SparseHamiltonian = Eigen::SparseMatrix<cplx>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Isolated sample: one-particle Hamiltonian and pair potential.
struct SampleSpec {
    CMatrix hamiltonian;   // h_S, Hermitian n x n
    RMatrix pair_potential; // w, real symmetric with zero diagonal
    double interaction = 0.0; // xi

    [[nodiscard]] int size() const { return static_cast<int>(hamiltonian.rows()); }
};

/// One semi-infinite lead attached to the sample.
struct LeadSpec {
    double coupling = 0.0;   // d_j
    CVector contact;         // phi_j, unit vector on the sample
    double bias = 0.0;       // v_j
    double beta = 1.0;       // inverse temperature
    double mu = 0.0;         // chemical potential
};

enum class Scenario { partitioned, partition_free };

struct SystemConfig {
    SampleSpec sample;
    double hopping = 1.0; // c_R, shared by all leads
    std::vector<LeadSpec> leads;
    Scenario scenario = Scenario::partitioned;
    // Equilibrium reference for the partition-free scenario.
    double beta_eq = 1.0;
    double mu_eq = 0.0;

    [[nodiscard]] int n_sites() const { return sample.size(); }
    [[nodiscard]] int n_leads() const { return static_cast<int>(leads.size()); }
    [[nodiscard]] bool is_real() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] std::string summary() const;
};

inline constexpr double input_tolerance = 1e-12;

ValidationReport validate(const SystemConfig& config);

/// Throws ConfigError carrying the validation summary.
void require_valid(const SystemConfig& config);

/// Site flattening of a finite truncation: sample sites first, then each
/// lead's sites contiguously with the contact site first.
struct SiteLayout {
    int n_sample = 0;
    int n_leads = 0;
    int lead_length = 0;

    [[nodiscard]] int dimension() const { return n_sample + n_leads * lead_length; }
    [[nodiscard]] int sample(int x) const { return x; }
    [[nodiscard]] int lead(int j, int x) const { return n_sample + j * lead_length + x; }
};

/// Pieces of the truncated one-particle Hamiltonian, kept apart so that the
/// coupling and the bias can be switched independently.
struct HamiltonianParts {
    SiteLayout layout;
    SparseHamiltonian decoupled; // h_S (+) lead Dirichlet chains, no bias
    SparseHamiltonian tunneling; // h_T
    SparseHamiltonian bias;      // (+)_j v_j 1_j

    /// decoupled + coupling_scale * tunneling + bias_scale * bias
    [[nodiscard]] SparseHamiltonian combine(double coupling_scale, double bias_scale) const;
};

HamiltonianParts hamiltonian_parts(const SystemConfig& config, int lead_length);

/// Dense h_v = h_{D,v} + h_T on the truncation with L sites per lead.
CMatrix effective_single_particle_hamiltonian(const SystemConfig& config, int lead_length);

} // namespace neqt
