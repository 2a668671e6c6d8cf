#include "neqt/model.hpp"

#include <cmath>
#include <sstream>

namespace neqt {

bool SystemConfig::is_real() const
{
    if (sample.hamiltonian.imag().cwiseAbs().maxCoeff() > 0.0) return false;
    for (const auto& lead : leads)
        if (lead.contact.size() > 0 && lead.contact.imag().cwiseAbs().maxCoeff() > 0.0) return false;
    return true;
}

std::string ValidationReport::summary() const
{
    if (ok()) return "valid";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

ValidationReport validate(const SystemConfig& config)
{
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    const auto& h = config.sample.hamiltonian;
    const auto& w = config.sample.pair_potential;
    const int n = config.n_sites();

    if (n < 1) fail("sample must have at least one site");
    if (h.rows() != h.cols()) fail("h_S must be square");
    if (n >= 1 && h.rows() == h.cols() && (h - h.adjoint()).cwiseAbs().maxCoeff() > input_tolerance)
        fail("h_S hermiticity");

    if (w.rows() != n || w.cols() != n) {
        fail("w must be n x n");
    } else if (n >= 1) {
        if ((w - w.transpose()).cwiseAbs().maxCoeff() > input_tolerance) fail("symmetry of w");
        if (w.diagonal().cwiseAbs().maxCoeff() > input_tolerance) fail("zero diagonal of w");
        if (w.cwiseAbs().maxCoeff() > 1.0 + input_tolerance) fail("normalization |w| <= 1");
    }
    if (!std::isfinite(config.sample.interaction)) fail("interaction strength must be finite");

    if (!(config.hopping > 0.0)) fail("c_R > 0");
    if (config.leads.empty()) fail("at least one lead is required");

    for (int j = 0; j < config.n_leads(); ++j) {
        const auto& lead = config.leads[j];
        const std::string tag = "lead " + std::to_string(j) + ": ";
        if (lead.contact.size() != n) {
            fail(tag + "phi must have one entry per sample site");
        } else if (std::abs(lead.contact.norm() - 1.0) > input_tolerance) {
            fail(tag + "unit norm of phi");
        }
        if (!(lead.beta > 0.0)) fail(tag + "beta > 0");
        if (!std::isfinite(lead.coupling) || !std::isfinite(lead.bias) || !std::isfinite(lead.mu))
            fail(tag + "d, v and mu must be finite");
    }

    if (config.scenario == Scenario::partition_free) {
        if (!(config.beta_eq > 0.0)) fail("partition-free reference beta > 0");
        for (int j = 0; j < config.n_leads(); ++j) {
            const auto& lead = config.leads[j];
            if (std::abs(lead.beta - config.beta_eq) > input_tolerance ||
                std::abs(lead.mu - config.mu_eq) > input_tolerance)
                fail("lead " + std::to_string(j) + ": partition-free requires common (beta, mu)");
        }
    }
    return report;
}

void require_valid(const SystemConfig& config)
{
    auto report = validate(config);
    if (!report.ok()) throw ConfigError("invalid configuration: " + report.summary());
}

SparseHamiltonian HamiltonianParts::combine(double coupling_scale, double bias_scale) const
{
    SparseHamiltonian h = decoupled + coupling_scale * tunneling + bias_scale * bias;
    h.makeCompressed();
    return h;
}

HamiltonianParts hamiltonian_parts(const SystemConfig& config, int lead_length)
{
    if (lead_length < 1) throw std::invalid_argument("lead truncation must be >= 1");
    require_valid(config);

    HamiltonianParts parts;
    parts.layout = SiteLayout{config.n_sites(), config.n_leads(), lead_length};
    const auto& layout = parts.layout;
    const int dim = layout.dimension();
    const int n = config.n_sites();

    using Triplet = Eigen::Triplet<cplx>;
    std::vector<Triplet> decoupled, tunneling, bias;

    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (config.sample.hamiltonian(x, y) != cplx{}) decoupled.emplace_back(x, y, config.sample.hamiltonian(x, y));

    for (int j = 0; j < config.n_leads(); ++j) {
        const auto& lead = config.leads[j];
        for (int x = 0; x < lead_length; ++x) {
            const int a = layout.lead(j, x);
            if (x + 1 < lead_length) {
                decoupled.emplace_back(a, a + 1, -config.hopping);
                decoupled.emplace_back(a + 1, a, -config.hopping);
            }
            if (lead.bias != 0.0) bias.emplace_back(a, a, lead.bias);
        }
        // d_j (|delta_0j><phi_j| + |phi_j><delta_0j|)
        const int contact = layout.lead(j, 0);
        for (int x = 0; x < n; ++x) {
            const cplx amp = lead.coupling * lead.contact(x);
            if (amp == cplx{}) continue;
            tunneling.emplace_back(x, contact, amp);
            tunneling.emplace_back(contact, x, std::conj(amp));
        }
    }

    auto build = [dim](SparseHamiltonian& m, const std::vector<Triplet>& t) {
        m.resize(dim, dim);
        m.setFromTriplets(t.begin(), t.end());
        m.makeCompressed();
    };
    build(parts.decoupled, decoupled);
    build(parts.tunneling, tunneling);
    build(parts.bias, bias);
    return parts;
}

CMatrix effective_single_particle_hamiltonian(const SystemConfig& config, int lead_length)
{
    return CMatrix(hamiltonian_parts(config, lead_length).combine(1.0, 1.0));
}

} // namespace neqt
