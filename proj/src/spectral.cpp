#include "neqt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "neqt/parallel.hpp"

namespace neqt {

namespace {

CMatrix self_energy_matrix(const SystemConfig& config, double E)
{
    const int n = config.n_sites();
    CMatrix vs = CMatrix::Zero(n, n);
    for (const auto& lead : config.leads) {
        if (lead.coupling == 0.0) continue;
        const cplx g = surface_green(E, lead.bias, config.hopping);
        vs.noalias() += (lead.coupling * lead.coupling * g) * lead.contact * lead.contact.adjoint();
    }
    return vs;
}

CMatrix kernel_matrix(const SystemConfig& config, double E)
{
    CMatrix k = config.sample.hamiltonian + self_energy_matrix(config, E);
    k.diagonal().array() -= E;
    return k;
}

double operator_norm(const CMatrix& a)
{
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

std::string energy_text(double E)
{
    std::ostringstream os;
    os.precision(12);
    os << E;
    return os.str();
}

} // namespace

SelfEnergy embedding_self_energy(const SystemConfig& config, double E)
{
    require_valid(config);
    return {E, self_energy_matrix(config, E)};
}

double singular_tolerance(const SystemConfig& config)
{
    return 1e-8 * operator_norm(config.sample.hamiltonian) + 1e-12;
}

double smallest_singular_value(const SystemConfig& config, double E)
{
    const CMatrix k = kernel_matrix(config, E);
    const auto sv = Eigen::JacobiSVD<CMatrix>(k).singularValues();
    return sv(sv.size() - 1);
}

SampleResolvent sample_resolvent(const SystemConfig& config, double E)
{
    require_valid(config);
    const CMatrix k = kernel_matrix(config, E);
    Eigen::JacobiSVD<CMatrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin < singular_tolerance(config))
        throw SingularMatrix("h_S + v_S(E) - E is singular at E = " + energy_text(E), E, smin);
    SampleResolvent out;
    out.E = E;
    out.sigma_min = smin;
    out.condition_number = s(0) / smin;
    out.matrix = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    return out;
}

Embedding::Embedding(const SystemConfig& config) : config_(config)
{
    require_valid(config_);
    phi_.resize(n(), m());
    for (int j = 0; j < m(); ++j) phi_.col(j) = config_.leads[j].contact;
    singular_tol_ = singular_tolerance(config_);
}

CMatrix Embedding::kernel(double E) const { return kernel_matrix(config_, E); }

CMatrix Embedding::resolvent_on_contacts(double E) const
{
    const CMatrix k = kernel(E);
    Eigen::PartialPivLU<CMatrix> lu(k);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        const double smin = smallest_singular_value(config_, E);
        if (smin < singular_tol_)
            throw SingularMatrix("h_S + v_S(E) - E is singular at E = " + energy_text(E), E, smin);
        Eigen::JacobiSVD<CMatrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return svd.solve(phi_);
    }
    return lu.solve(phi_);
}

CMatrix Embedding::resolvent(double E) const
{
    return sample_resolvent(config_, E).matrix;
}

namespace {

struct ScanContext {
    const SystemConfig& config;
    double tol;
    double refine_tol;
};

// Real determinant of the Hermitian kernel where every coupled lead is off band.
double hermitian_determinant(const SystemConfig& config, double E)
{
    return kernel_matrix(config, E).determinant().real();
}

bool kernel_is_hermitian_on(const SystemConfig& config, double a, double b)
{
    const double mid = 0.5 * (a + b);
    for (const auto& lead : config.leads) {
        if (lead.coupling == 0.0) continue;
        if (band_point(mid, lead.bias, config.hopping).side == BandSide::inside) return false;
    }
    return true;
}

SpectralViolationPoint refine_minimum(const ScanContext& ctx, double a, double b)
{
    auto sigma = [&](double E) { return smallest_singular_value(ctx.config, E); };
    constexpr double inv_phi = 0.61803398874989484820;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = sigma(x1), f2 = sigma(x2);
    while (b - a > ctx.refine_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = sigma(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = sigma(x2);
        }
    }
    SpectralViolationPoint best{f1 <= f2 ? x1 : x2, std::min(f1, f2)};

    // sigma_min is V-shaped at an isolated zero; intersect the two flanks
    const double h = std::max(1e-6, 1e3 * ctx.refine_tol) * (1.0 + std::abs(best.E));
    const double l2 = sigma(best.E - 2 * h), l1 = sigma(best.E - h);
    const double r1 = sigma(best.E + h), r2 = sigma(best.E + 2 * h);
    const double sl = (l1 - l2) / h, sr = (r2 - r1) / h;
    if (sl < 0.0 && sr > 0.0) {
        // l1 + sl (E - (x - h)) = r1 + sr (E - (x + h))
        const double x = best.E;
        const double E = (r1 - l1 + sl * (x - h) - sr * (x + h)) / (sl - sr);
        if (std::abs(E - x) < 2 * h) {
            const double s = sigma(E);
            if (s < best.sigma_min) best = {E, s};
        }
    }
    return best;
}

SpectralViolationPoint bisect_determinant(const ScanContext& ctx, double a, double b)
{
    double fa = hermitian_determinant(ctx.config, a);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = hermitian_determinant(ctx.config, mid);
        if (fm == 0.0) {
            a = b = mid;
            break;
        }
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    const double sa = smallest_singular_value(ctx.config, a);
    const double sb = smallest_singular_value(ctx.config, b);
    return sa <= sb ? SpectralViolationPoint{a, sa} : SpectralViolationPoint{b, sb};
}

} // namespace

SpectralReport check_spectral_condition(const SystemConfig& config, const ScanSpec& scan)
{
    require_valid(config);
    const auto geo = band_geometry(config);
    double coupling_norm = 0.0;
    for (const auto& lead : config.leads) coupling_norm += lead.coupling * lead.coupling;
    coupling_norm = std::sqrt(coupling_norm);
    const double margin = scan.margin >= 0.0
                              ? scan.margin
                              : 4.0 * config.hopping + operator_norm(config.sample.hamiltonian) + coupling_norm;

    SpectralReport report;
    report.E_lo = geo.thresholds.front() - margin;
    report.E_hi = geo.thresholds.back() + margin;
    report.refine_tol = scan.refine_tol;
    report.singular_tol = singular_tolerance(config);
    const ScanContext ctx{config, report.singular_tol, scan.refine_tol};

    std::vector<double> grid;
    const int npts = std::max(scan.grid_points, 3);
    for (int i = 0; i < npts; ++i) grid.push_back(report.E_lo + (report.E_hi - report.E_lo) * i / (npts - 1));
    for (double t : geo.thresholds) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    report.grid_points = static_cast<int>(grid.size());

    std::vector<double> sigma(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { sigma[i] = smallest_singular_value(config, grid[i]); });
    report.grid_sigma_min = *std::min_element(sigma.begin(), sigma.end());

    // Candidate brackets: local minima of sigma_min and determinant sign changes.
    struct Candidate {
        double a, b;
        bool bisect;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (sigma[i] <= sigma[i - 1] && sigma[i] <= sigma[i + 1]) candidates.push_back({grid[i - 1], grid[i + 1], false});
    std::vector<double> det(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) { det[i] = hermitian_determinant(config, grid[i]); });
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!kernel_is_hermitian_on(config, grid[i], grid[i + 1])) continue;
        if (det[i] == 0.0) {
            candidates.push_back({grid[i], grid[i], true});
        } else if ((det[i] > 0) != (det[i + 1] > 0) && det[i + 1] != 0.0) {
            candidates.push_back({grid[i], grid[i + 1], true});
        }
    }
    report.refined_candidates = static_cast<int>(candidates.size());

    std::vector<SpectralViolationPoint> found(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        const auto& c = candidates[i];
        found[i] = c.bisect ? bisect_determinant(ctx, c.a, c.b) : refine_minimum(ctx, c.a, c.b);
    });

    std::vector<SpectralViolationPoint> flagged;
    for (const auto& p : found) {
        report.grid_sigma_min = std::min(report.grid_sigma_min, p.sigma_min);
        if (p.sigma_min < report.singular_tol) flagged.push_back(p);
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (sigma[i] < report.singular_tol) flagged.push_back({grid[i], sigma[i]});
    std::sort(flagged.begin(), flagged.end(), [](auto& x, auto& y) { return x.E < y.E; });
    for (const auto& p : flagged) {
        auto& v = report.violations;
        if (!v.empty() && std::abs(p.E - v.back().E) <= 1e-7 * (1.0 + std::abs(p.E))) {
            if (p.sigma_min < v.back().sigma_min) v.back() = p;
        } else {
            v.push_back(p);
        }
    }
    report.passed = report.violations.empty();
    return report;
}

} // namespace neqt
