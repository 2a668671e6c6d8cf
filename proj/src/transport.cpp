#include "neqt/transport.hpp"

#include <algorithm>
#include <cmath>

namespace neqt {

double fermi(double x)
{
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

RMatrix transmission_matrix(const Embedding& emb, double E)
{
    const auto& cfg = emb.config();
    const int m = emb.m();
    RMatrix T = RMatrix::Zero(m, m);
    RVector weight(m);
    bool any = false;
    for (int j = 0; j < m; ++j) {
        const auto& lead = cfg.leads[j];
        weight(j) = lead.coupling * lead.coupling * spectral_factor(E - lead.bias, cfg.hopping);
        any = any || weight(j) != 0.0;
    }
    if (!any) return T;
    const CMatrix mphi = emb.resolvent_on_contacts(E);
    const CMatrix overlap = emb.contacts().adjoint() * mphi; // <phi_j | m phi_k>
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            if (j != k) T(j, k) = weight(j) * weight(k) * std::norm(overlap(j, k));
    return T;
}

TransmissionMatrix transmission(const SystemConfig& config, double E)
{
    Embedding emb(config);
    return {E, transmission_matrix(emb, E)};
}

std::vector<double> integration_breakpoints(const SystemConfig& config)
{
    const auto geo = band_geometry(config);
    std::vector<double> points = geo.thresholds;
    const double lo = geo.thresholds.front(), hi = geo.thresholds.back();
    for (const auto& lead : config.leads) {
        const double ef = lead.bias + lead.mu;
        for (double k : {0.0, -8.0, -2.0, 2.0, 8.0}) {
            const double p = ef + k / lead.beta;
            if (p > lo && p < hi) points.push_back(p);
        }
    }
    // resonances: complex eigenvalues of h_S + v_S(E) after two fixed-point sweeps
    const Eigen::ComplexEigenSolver<CMatrix> bare(config.sample.hamiltonian);
    for (Eigen::Index r = 0; r < bare.eigenvalues().size(); ++r) {
        cplx z = bare.eigenvalues()(r);
        for (int sweep = 0; sweep < 2; ++sweep) {
            const CMatrix heff = config.sample.hamiltonian + embedding_self_energy(config, z.real()).matrix;
            const Eigen::ComplexEigenSolver<CMatrix> es(heff, false);
            Eigen::Index best = 0;
            (es.eigenvalues().array() - z).abs().minCoeff(&best);
            z = es.eigenvalues()(best);
        }
        const double width = std::max(std::abs(z.imag()), 1e-6);
        for (double k : {0.0, -4.0, -1.0, 1.0, 4.0}) {
            const double p = z.real() + k * width;
            if (p > lo && p < hi) points.push_back(p);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

namespace {

// Stacked integrand [J_0..J_{m-1}, E_0..E_{m-1}] at energy E.
RVector current_density(const Embedding& emb, double E)
{
    const auto& cfg = emb.config();
    const int m = emb.m();
    RVector out = RVector::Zero(2 * m);
    const RMatrix T = transmission_matrix(emb, E);
    RVector f(m);
    for (int j = 0; j < m; ++j) {
        const auto& lead = cfg.leads[j];
        f(j) = fermi(lead.beta * (E - lead.bias - lead.mu));
    }
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += T(j, k) * (f(j) - f(k));
        out(j) = s;
        out(m + j) = (E - cfg.leads[j].bias) * s;
    }
    return out;
}

} // namespace

SteadyObservables lb_currents(const SystemConfig& config, const QuadratureSpec& spec)
{
    Embedding emb(config);
    const int m = emb.m();
    auto res = integrate_segments<RVector>([&](double E) { return current_density(emb, E); },
                                           integration_breakpoints(config), spec);
    SteadyObservables out;
    out.J = res.value.head(m);
    out.Eflux = res.value.tail(m);
    out.J_error = RVector::Constant(m, res.error);
    out.Eflux_error = RVector::Constant(m, res.error);
    out.evaluations = res.evaluations;
    out.sigma = entropy_from_currents(config, out.J, out.Eflux);
    return out;
}

double entropy_from_currents(const SystemConfig& config, const RVector& J, const RVector& Eflux)
{
    double s = 0.0;
    for (int j = 0; j < config.n_leads(); ++j) s -= config.leads[j].beta * (Eflux(j) - config.leads[j].mu * J(j));
    return s;
}

bool transmission_vanishes(const SystemConfig& config, int j, int k, int samples, double threshold)
{
    const auto geo = band_geometry(config);
    const auto [lo, hi] = geo.overlap(j, k);
    if (!(hi > lo)) return true;
    Embedding emb(config);
    for (int i = 1; i < samples; ++i) {
        const double E = lo + (hi - lo) * i / samples;
        if (transmission_matrix(emb, E)(j, k) > threshold) return false;
    }
    return true;
}

EntropyReport entropy_production(const SystemConfig& config, const QuadratureSpec& spec)
{
    EntropyReport out;
    out.currents = lb_currents(config, spec);
    out.sigma = out.currents.sigma;
    const int m = config.n_leads();
    for (int j = 0; j < m && !out.strictly_positive; ++j)
        for (int k = j + 1; k < m && !out.strictly_positive; ++k) {
            const auto& a = config.leads[j];
            const auto& b = config.leads[k];
            const bool driven = a.beta != b.beta || a.bias + a.mu != b.bias + b.mu;
            if (driven && !(transmission_vanishes(config, j, k) && transmission_vanishes(config, k, j)))
                out.strictly_positive = true;
        }
    return out;
}

namespace {

// dJ_j/dmu_k integrand by central differences in mu_k, evaluated pointwise
// so that every column shares the quadrature nodes of the unperturbed problem.
RVector onsager_density(const Embedding& emb, double E, double h)
{
    const auto& cfg = emb.config();
    const int m = emb.m();
    const RMatrix T = transmission_matrix(emb, E);
    RVector f(m);
    for (int j = 0; j < m; ++j) f(j) = fermi(cfg.leads[j].beta * (E - cfg.leads[j].bias - cfg.leads[j].mu));
    RVector out = RVector::Zero(m * m);
    for (int k = 0; k < m; ++k) {
        const auto& lk = cfg.leads[k];
        const double fp = fermi(lk.beta * (E - lk.bias - lk.mu - h));
        const double fm = fermi(lk.beta * (E - lk.bias - lk.mu + h));
        const double df = (fp - fm) / (2.0 * h);
        for (int j = 0; j < m; ++j) {
            double d = 0.0;
            if (j == k) {
                for (int l = 0; l < m; ++l) d += T(k, l) * df;
            } else {
                d = -T(j, k) * df;
            }
            out(j + m * k) = d / lk.beta;
        }
    }
    return out;
}

} // namespace

OnsagerMatrix onsager_matrix(const SystemConfig& config, double step, const QuadratureSpec& spec)
{
    require_valid(config);
    const auto& first = config.leads.front();
    for (const auto& lead : config.leads)
        if (lead.beta != first.beta || lead.mu != first.mu || lead.bias != 0.0)
            throw ConfigError("onsager_matrix needs equal (beta, mu) and zero bias in every lead");
    const double h = step > 0.0 ? step : 1e-4 * config.hopping;
    const int m = config.n_leads();

    Embedding emb(config);
    const auto points = integration_breakpoints(config);
    auto run = [&](double hh) {
        auto res = integrate_segments<RVector>([&](double E) { return onsager_density(emb, E, hh); }, points, spec);
        return RMatrix(Eigen::Map<const RMatrix>(res.value.data(), m, m));
    };
    OnsagerMatrix out;
    out.step = h;
    out.L = run(h);
    out.richardson_change = (out.L - run(0.5 * h)).cwiseAbs().maxCoeff();
    return out;
}

} // namespace neqt
