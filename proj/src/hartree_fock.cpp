#include "neqt/hartree_fock.hpp"

#include <sstream>

namespace neqt {

HartreeFockPotential potential_from_density(const RMatrix& w, const CMatrix& density)
{
    const auto n = w.rows();
    HartreeFockPotential p;
    p.density = density;
    p.v_H = RMatrix::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y) p.v_H(x, x) += w(x, y) * density(y, y).real();
    p.v_X = w.cast<cplx>().cwiseProduct(density);
    p.v_HF = p.v_H.cast<cplx>() - p.v_X;
    return p;
}

HartreeFockPotential build_potential(const SystemConfig& config, const QuadratureSpec& spec)
{
    require_valid(config);
    SystemConfig free = config;
    free.sample.interaction = 0.0;
    const auto rho = ness_density_matrix(free, standard_sites(free, 0), spec);
    return potential_from_density(config.sample.pair_potential, rho.values);
}

SystemConfig hf_system(const SystemConfig& config, const QuadratureSpec& spec, const ScanSpec& scan)
{
    require_valid(config);
    if (config.sample.interaction == 0.0) return config;
    const auto pot = build_potential(config, spec);
    SystemConfig out = config;
    out.sample.hamiltonian = config.sample.hamiltonian + config.sample.interaction * pot.v_HF;
    // symmetrize away roundoff so validation sees an exactly Hermitian matrix
    out.sample.hamiltonian = 0.5 * (out.sample.hamiltonian + out.sample.hamiltonian.adjoint()).eval();
    out.sample.interaction = 0.0;
    const auto report = check_spectral_condition(out, scan);
    if (!report.passed) {
        std::ostringstream os;
        os << "Hartree-Fock Hamiltonian violates the spectral condition near E = " << report.violations.front().E;
        throw SpectralViolation(os.str());
    }
    return out;
}

} // namespace neqt
