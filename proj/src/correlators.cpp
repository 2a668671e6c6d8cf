#include "neqt/correlators.hpp"

#include <algorithm>
#include <cmath>

#include "neqt/leads.hpp"
#include "neqt/transport.hpp"

namespace neqt {

std::vector<Site> standard_sites(const SystemConfig& config, int lead_sites)
{
    std::vector<Site> sites;
    for (int x = 0; x < config.n_sites(); ++x) sites.push_back(Site::sample(x));
    for (int j = 0; j < config.n_leads(); ++j)
        for (int x = 0; x < lead_sites; ++x) sites.push_back(Site::on_lead(j, x));
    return sites;
}

namespace {

void check_sites(const SystemConfig& config, const std::vector<Site>& sites)
{
    for (const auto& s : sites) {
        if (s.in_sample() ? (s.index < 0 || s.index >= config.n_sites())
                          : (s.lead >= config.n_leads() || s.index < 0))
            throw ConfigError("site out of range");
    }
}

void require_noninteracting(const SystemConfig& config)
{
    if (config.sample.interaction != 0.0 && config.sample.pair_potential.cwiseAbs().maxCoeff() > 0.0)
        throw ConfigError("two-point functions are available for the non-interacting system only (xi = 0)");
}

std::vector<double> band_union_breakpoints(const SystemConfig& config)
{
    return integration_breakpoints(config);
}

RVector occupations(const SystemConfig& config, double E)
{
    RVector f(config.n_leads());
    for (int j = 0; j < config.n_leads(); ++j) {
        const auto& lead = config.leads[j];
        f(j) = fermi(lead.beta * (E - lead.bias - lead.mu));
    }
    return f;
}

// Flattened column-major outer product sum_j w_j psi_j psi_j^*.
CVector weighted_outer(const CMatrix& psi, const RVector& w)
{
    const CMatrix rho = psi * w.asDiagonal() * psi.adjoint();
    return Eigen::Map<const CVector>(rho.data(), rho.size());
}

} // namespace

CMatrix scattering_states(const Embedding& emb, double E, const std::vector<Site>& sites)
{
    const auto& cfg = emb.config();
    const double c = cfg.hopping;
    const int m = emb.m();
    CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(sites.size()), m);

    std::vector<double> sin_theta(m, 0.0), theta(m, 0.0);
    bool any = false;
    for (int j = 0; j < m; ++j) {
        const auto p = band_point(E, cfg.leads[j].bias, c);
        if (p.side == BandSide::inside && std::sin(p.theta) > 0.0) {
            theta[j] = p.theta;
            sin_theta[j] = std::sin(p.theta);
            any = true;
        }
    }
    if (!any) return psi;

    const CMatrix mphi = emb.resolvent_on_contacts(E);
    const CMatrix overlap = emb.contacts().adjoint() * mphi; // (k, j) = <phi_k | m phi_j>

    for (std::size_t a = 0; a < sites.size(); ++a) {
        const Site& s = sites[a];
        for (int j = 0; j < m; ++j) {
            if (sin_theta[j] == 0.0) continue;
            const double dj = cfg.leads[j].coupling;
            const double amp = std::sqrt(sin_theta[j] / c);
            if (s.in_sample()) {
                psi(a, j) = -dj * amp * mphi(s.index, j);
                continue;
            }
            const int k = s.lead;
            cplx value = 0.0;
            if (k == j) {
                const double sign = (s.index % 2 == 0) ? 1.0 : -1.0;
                value += sign * std::sin(theta[j] * (s.index + 1)) / std::sqrt(c * sin_theta[j]);
            }
            const double dk = cfg.leads[k].coupling;
            if (dk != 0.0 && dj != 0.0)
                value += dj * amp * dk * lead_resolvent_entry(s.index, 0, E, cfg.leads[k].bias, c) * overlap(k, j);
            psi(a, j) = value;
        }
    }
    return psi;
}

CorrelationMatrix ness_density_matrix(const SystemConfig& config, const std::vector<Site>& sites,
                                      const QuadratureSpec& spec)
{
    require_noninteracting(config);
    check_sites(config, sites);
    Embedding emb(config);
    const auto n = static_cast<Eigen::Index>(sites.size());
    auto res = integrate_segments<CVector>(
        [&](double E) { return weighted_outer(scattering_states(emb, E, sites), occupations(config, E)); },
        band_union_breakpoints(config), spec);
    CorrelationMatrix out;
    out.sites = sites;
    out.values = Eigen::Map<const CMatrix>(res.value.data(), n, n) / pi;
    out.error = res.error / pi;
    return out;
}

const std::vector<cplx>& GreensFunction::values(GreenKind kind) const
{
    switch (kind) {
    case GreenKind::lesser: return lesser;
    case GreenKind::greater: return greater;
    case GreenKind::retarded: return retarded;
    case GreenKind::advanced: return advanced;
    }
    return lesser;
}

GreensFunction green_time_series(const SystemConfig& config, const std::vector<double>& times, const Site& x,
                                 const Site& y, const QuadratureSpec& spec)
{
    require_noninteracting(config);
    const std::vector<Site> sites{x, y};
    check_sites(config, sites);
    Embedding emb(config);
    const auto nt = static_cast<Eigen::Index>(times.size());

    double tmax = 0.0;
    for (double t : times) tmax = std::max(tmax, std::abs(t));
    auto points = band_union_breakpoints(config);
    if (tmax > 0.0) points = subdivide(points, pi / tmax);

    // [lesser integrand (nt), anticommutator integrand (nt)]
    auto integrand = [&](double E) {
        CVector out = CVector::Zero(2 * nt);
        const CMatrix psi = scattering_states(emb, E, sites);
        const RVector f = occupations(config, E);
        cplx occ = 0.0, all = 0.0;
        for (int j = 0; j < emb.m(); ++j) {
            const cplx pp = psi(0, j) * std::conj(psi(1, j));
            occ += f(j) * pp;
            all += pp;
        }
        for (Eigen::Index i = 0; i < nt; ++i) {
            const cplx phase = std::polar(1.0, times[i] * E);
            out(i) = occ * phase;
            out(nt + i) = all * phase;
        }
        return out;
    };
    auto res = integrate_segments<CVector>(integrand, points, spec);

    GreensFunction g;
    g.x = x;
    g.y = y;
    g.times = times;
    for (Eigen::Index i = 0; i < nt; ++i) {
        const cplx lesser = I * res.value(i) / pi;
        const cplx anti = res.value(nt + i) / pi; // A(t) = -i (G^< - G^>)
        const cplx greater = lesser - I * anti;
        const double t = times[i];
        const double step_neg = t < 0 ? 1.0 : (t == 0 ? 0.5 : 0.0);
        g.lesser.push_back(lesser);
        g.greater.push_back(greater);
        g.retarded.push_back(I * step_neg * anti);
        g.advanced.push_back(-I * (1.0 - step_neg) * anti);
    }
    return g;
}

GreenValues green_functions(const SystemConfig& config, double t, const Site& x, const Site& y,
                            const QuadratureSpec& spec)
{
    const auto g = green_time_series(config, {t}, x, y, spec);
    return {g.lesser[0], g.greater[0], g.retarded[0], g.advanced[0]};
}

std::vector<cplx> fourier_lesser(const SystemConfig& config, const std::vector<double>& omegas, const Site& x,
                                 const Site& y)
{
    require_noninteracting(config);
    const std::vector<Site> sites{x, y};
    check_sites(config, sites);
    Embedding emb(config);
    std::vector<cplx> out(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const CMatrix psi = scattering_states(emb, omegas[i], sites);
        const RVector f = occupations(config, omegas[i]);
        cplx s = 0.0;
        for (int j = 0; j < emb.m(); ++j) s += f(j) * psi(0, j) * std::conj(psi(1, j));
        out[i] = 2.0 * I * s;
    }
    return out;
}

namespace {

double uniform_step(const std::vector<double>& grid, const char* what)
{
    if (grid.size() < 2) throw std::invalid_argument(std::string(what) + " grid needs at least two points");
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::abs(h) + 1e-14)
            throw std::invalid_argument(std::string(what) + " grid must be uniform");
    return h;
}

} // namespace

FourierSamples fourier_transform(const std::vector<double>& times, const std::vector<cplx>& values,
                                 const std::vector<double>& omegas, double decay_threshold)
{
    if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
    const double dt = uniform_step(times, "time");
    double peak = 0.0;
    for (const auto& v : values) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(values.front()), std::abs(values.back()));
    FourierSamples out;
    out.omegas = omegas;
    out.window_lo = times.front();
    out.window_hi = times.back();
    out.edge_ratio = peak > 0.0 ? edge / peak : 0.0;
    if (out.edge_ratio > decay_threshold)
        throw NumericalFailure("time window too short: |G| at the window edge is " + std::to_string(out.edge_ratio) +
                               " of its peak");
    out.values.resize(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t k) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double w = (i == 0 || i + 1 == times.size()) ? 0.5 : 1.0;
            s += w * values[i] * std::polar(1.0, -times[i] * omegas[k]);
        }
        out.values[k] = s * dt;
    });
    return out;
}

std::vector<cplx> inverse_fourier_transform(const std::vector<double>& omegas, const std::vector<cplx>& values,
                                            const std::vector<double>& times)
{
    if (omegas.size() != values.size()) throw std::invalid_argument("omegas and values differ in length");
    const double dw = uniform_step(omegas, "frequency");
    std::vector<cplx> out(times.size());
    parallel_for(times.size(), [&](std::size_t k) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const double w = (i == 0 || i + 1 == omegas.size()) ? 0.5 : 1.0;
            s += w * values[i] * std::polar(1.0, times[k] * omegas[i]);
        }
        out[k] = s * dw / (2.0 * pi);
    });
    return out;
}

double steady_current_from_lesser(const SystemConfig& config, int lead, const QuadratureSpec& spec)
{
    if (lead < 0 || lead >= config.n_leads()) throw ConfigError("lead index out of range");
    const auto& l = config.leads[lead];
    if (l.coupling == 0.0) return 0.0;
    std::vector<Site> sites{Site::on_lead(lead, 0)};
    for (int x = 0; x < config.n_sites(); ++x) sites.push_back(Site::sample(x));
    const auto rho = ness_density_matrix(config, sites, spec);
    cplx s = 0.0;
    for (int x = 0; x < config.n_sites(); ++x) s += I * rho.values(0, x + 1) * l.contact(x); // G^<(0) = i rho
    return -2.0 * l.coupling * s.real();
}

} // namespace neqt
