#include <gtest/gtest.h>

#include "neqt/correlators.hpp"
#include "neqt/leads.hpp"
#include "neqt/transport.hpp"
#include "oracles.hpp"

using namespace neqt;

namespace {

constexpr int chain_length = 600;

SystemConfig equilibrium_two_site(double beta, double mu)
{
    auto cfg = ref::two_site(0.0);
    cfg.sample.hamiltonian(0, 1) = cplx(-0.5, 0.2);
    cfg.sample.hamiltonian(1, 0) = cplx(-0.5, -0.2);
    for (auto& l : cfg.leads) {
        l.beta = beta;
        l.mu = mu;
    }
    return cfg;
}

int chain_index(const SystemConfig& cfg, const Site& s)
{
    return s.in_sample() ? s.index : cfg.n_sites() + s.lead * chain_length + s.index;
}

} // namespace

TEST(Correlators, EquilibriumDensityMatchesFermiFunctionOfTruncation)
{
    const auto cfg = equilibrium_two_site(2.0, 0.1);
    const auto sites = standard_sites(cfg, 5);
    const auto rho = ness_density_matrix(cfg, sites);

    std::vector<int> cols;
    for (const auto& s : sites) cols.push_back(chain_index(cfg, s));
    const auto h = ref::chain_hamiltonian(cfg, chain_length);
    const CMatrix ref = ref::chebyshev_columns(h, [](double E) { return cplx(ref::fermi_reference(2.0 * (E - 0.1))); }, cols);
    for (std::size_t a = 0; a < sites.size(); ++a)
        for (std::size_t b = 0; b < sites.size(); ++b)
            EXPECT_LT(std::abs(rho.values(a, b) - ref(cols[a], b)), 1e-8) << a << " " << b;
}

TEST(Correlators, DensityMatrixIsHermitianWithBoundedSpectrum)
{
    auto cfg = ref::two_site(0.0);
    const auto rho = ness_density_matrix(cfg, standard_sites(cfg, 3));
    EXPECT_LT((rho.values - rho.values.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.values);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-9);
}

TEST(Correlators, InteractingSampleRejected)
{
    EXPECT_THROW(ness_density_matrix(ref::two_site(0.1), standard_sites(ref::two_site(0.1), 0)), ConfigError);
}

TEST(Correlators, GreenFunctionsMatchTruncatedPropagator)
{
    const auto cfg = equilibrium_two_site(3.0, -0.2);
    const auto h = ref::chain_hamiltonian(cfg, chain_length);
    const std::vector<std::pair<Site, Site>> pairs{{Site::sample(0), Site::sample(1)},
                                                   {Site::on_lead(1, 2), Site::sample(0)},
                                                   {Site::on_lead(0, 1), Site::on_lead(1, 0)}};
    for (double t : {0.0, 2.5, -1.5, 7.0})
        for (const auto& [x, y] : pairs) {
            const auto g = green_functions(cfg, t, x, y);
            const int col = chain_index(cfg, y);
            auto lesser = [&](double E) { return cplx(0.0, 1.0) * std::polar(1.0, t * E) * ref::fermi_reference(3.0 * (E + 0.2)); };
            auto greater = [&](double E) {
                return cplx(0.0, 1.0) * std::polar(1.0, t * E) * (ref::fermi_reference(3.0 * (E + 0.2)) - 1.0);
            };
            const cplx ref_l = ref::chebyshev_columns(h, lesser, {col})(chain_index(cfg, x), 0);
            const cplx ref_g = ref::chebyshev_columns(h, greater, {col})(chain_index(cfg, x), 0);
            EXPECT_LT(std::abs(g.lesser - ref_l), 1e-8) << t;
            EXPECT_LT(std::abs(g.greater - ref_g), 1e-8) << t;
        }
}

TEST(Correlators, KeldyshStructure)
{
    const auto cfg = ref::two_site(0.0);
    const std::vector<double> times{-3.0, -0.5, 0.0, 0.5, 3.0};
    const auto series = green_time_series(cfg, times, Site::sample(0), Site::on_lead(1, 1));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const cplx lhs = series.retarded[i] - series.advanced[i];
        const cplx rhs = series.lesser[i] - series.greater[i];
        EXPECT_LT(std::abs(lhs - rhs), 1e-10) << times[i];
        if (times[i] > 0) EXPECT_EQ(series.retarded[i], cplx{});
        if (times[i] < 0) EXPECT_EQ(series.advanced[i], cplx{});
    }
    // anticommutator at equal times
    const auto g0 = green_functions(cfg, 0.0, Site::sample(1), Site::sample(1));
    EXPECT_LT(std::abs(g0.greater - g0.lesser - cplx(0.0, -1.0)), 1e-9);
    const auto rho = ness_density_matrix(cfg, {Site::sample(1)});
    EXPECT_LT(std::abs(g0.lesser - cplx(0.0, 1.0) * rho.values(0, 0)), 1e-10);
}

TEST(Correlators, SeriesAgreesWithPointwiseEvaluation)
{
    const auto cfg = ref::two_site(0.0);
    const std::vector<double> times{0.0, 1.0, 4.0};
    const auto series = green_time_series(cfg, times, Site::sample(1), Site::sample(0));
    for (std::size_t i = 0; i < times.size(); ++i)
        EXPECT_LT(std::abs(series.lesser[i] - green_functions(cfg, times[i], Site::sample(1), Site::sample(0)).lesser), 1e-9);
}

TEST(Correlators, LesserTransformSupportedOnBands)
{
    auto cfg = ref::two_site(0.0);
    cfg.leads[1].bias = 1.0;
    std::vector<double> omegas;
    for (double w = -5.0; w <= 5.0; w += 0.05) omegas.push_back(w);
    const auto vals = fourier_lesser(cfg, omegas, Site::sample(0), Site::sample(0));
    const auto geo = band_geometry(cfg);
    double inside = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const bool in_any = geo.in_band(0, omegas[i]) || geo.in_band(1, omegas[i]);
        if (!in_any) EXPECT_LT(std::abs(vals[i]), 1e-10) << omegas[i];
        else inside = std::max(inside, std::abs(vals[i]));
    }
    EXPECT_GT(inside, 1e-2);
}

TEST(Correlators, NumericalTransformMatchesSpectralOne)
{
    // G^<(t) sampled on a long window, transformed numerically
    const auto cfg = ref::symmetric_dot(0.6, 2.0, 0.2);
    std::vector<double> times;
    for (double t = -150.0; t <= 150.0 + 1e-9; t += 0.25) times.push_back(t);
    const auto series = green_time_series(cfg, times, Site::sample(0), Site::sample(0));
    const std::vector<double> omegas{-1.0, 0.0, 0.7};
    const auto ft = fourier_transform(times, series.lesser, omegas, 1e-2);
    const auto direct = fourier_lesser(cfg, omegas, Site::sample(0), Site::sample(0));
    for (std::size_t i = 0; i < omegas.size(); ++i) EXPECT_LT(std::abs(ft.values[i] - direct[i]), 2e-2) << omegas[i];
}

TEST(Correlators, FourierPairOnGaussian)
{
    const double pi = 3.14159265358979323846;
    std::vector<double> times, omegas;
    std::vector<cplx> g;
    for (double t = -12.0; t <= 12.0 + 1e-9; t += 0.05) {
        times.push_back(t);
        g.push_back(std::exp(-0.5 * t * t));
    }
    for (double w = -12.0; w <= 12.0 + 1e-9; w += 0.05) omegas.push_back(w);
    const auto ft = fourier_transform(times, g, omegas);
    for (std::size_t i = 0; i < omegas.size(); i += 40)
        EXPECT_LT(std::abs(ft.values[i] - std::sqrt(2 * pi) * std::exp(-0.5 * omegas[i] * omegas[i])), 1e-10);
    const auto back = inverse_fourier_transform(omegas, ft.values, times);
    for (std::size_t i = 0; i < times.size(); i += 40) EXPECT_LT(std::abs(back[i] - g[i]), 1e-9);

    std::vector<cplx> flat(times.size(), 1.0);
    EXPECT_THROW(fourier_transform(times, flat, omegas), NumericalFailure);
}

TEST(Correlators, CurrentFromLesserEqualsLandauerButtiker)
{
    const auto cfg = ref::two_site(0.0);
    const auto obs = lb_currents(cfg);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(steady_current_from_lesser(cfg, j), obs.J(j), 1e-9);
}

TEST(Correlators, ScatteringStatesSolveSchrodingerOnContactSites)
{
    // (h psi)(x) = E psi(x) on the sample, the contact and the first lead sites
    const auto cfg = ref::two_site(0.0);
    const Embedding emb(cfg);
    const double E = 0.37;
    std::vector<Site> sites = standard_sites(cfg, 4);
    const CMatrix psi = scattering_states(emb, E, sites);
    auto at = [&](const Site& s) {
        for (std::size_t i = 0; i < sites.size(); ++i)
            if (sites[i] == s) return psi.row(static_cast<Eigen::Index>(i)).eval();
        throw std::logic_error("site");
    };
    for (int x = 0; x < 2; ++x) {
        Eigen::RowVectorXcd lhs = Eigen::RowVectorXcd::Zero(2);
        for (int y = 0; y < 2; ++y) lhs += cfg.sample.hamiltonian(x, y) * at(Site::sample(y));
        for (int j = 0; j < 2; ++j) lhs += cfg.leads[j].coupling * cfg.leads[j].contact(x) * at(Site::on_lead(j, 0));
        EXPECT_LT((lhs - E * at(Site::sample(x))).cwiseAbs().maxCoeff(), 1e-12);
    }
    for (int j = 0; j < 2; ++j)
        for (int x = 0; x < 3; ++x) {
            Eigen::RowVectorXcd lhs = -cfg.hopping * at(Site::on_lead(j, x + 1));
            if (x > 0) lhs -= cfg.hopping * at(Site::on_lead(j, x - 1));
            else
                for (int y = 0; y < 2; ++y) lhs += cfg.leads[j].coupling * std::conj(cfg.leads[j].contact(y)) * at(Site::sample(y));
            EXPECT_LT((lhs - E * at(Site::on_lead(j, x))).cwiseAbs().maxCoeff(), 1e-12);
        }
}
