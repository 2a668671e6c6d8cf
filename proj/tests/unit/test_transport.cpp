#include <gtest/gtest.h>

#include <random>

#include "neqt/spectral.hpp"
#include "neqt/transport.hpp"
#include "oracles.hpp"

using namespace neqt;

TEST(Transport, FermiFunctionIsOverflowSafe)
{
    EXPECT_DOUBLE_EQ(fermi(0.0), 0.5);
    EXPECT_EQ(fermi(1e4), 0.0);
    EXPECT_EQ(fermi(-1e4), 1.0);
    EXPECT_NEAR(fermi(2.0) + fermi(-2.0), 1.0, 1e-15);
}

TEST(Transport, ResonantTransmissionIndependentOfCoupling)
{
    const double pi = 3.14159265358979323846;
    for (double d : {0.2, 0.5, 1.0}) {
        const auto t = transmission(ref::symmetric_dot(d), 0.0);
        EXPECT_NEAR(t.T(0, 1), 1.0 / (2.0 * pi), 1e-10);
        EXPECT_NEAR(t.T(1, 0), 1.0 / (2.0 * pi), 1e-10);
        EXPECT_EQ(t.T(0, 0), 0.0);
    }
}

TEST(Transport, DotTransmissionAgainstClosedForm)
{
    auto cfg = ref::symmetric_dot(0.5);
    cfg.sample.hamiltonian(0, 0) = 0.3;
    cfg.leads[1].coupling = 0.7;
    for (double E = -2.5; E <= 2.5; E += 0.11)
        EXPECT_NEAR(transmission(cfg, E).T(0, 1), ref::dot_transmission(0.3, 0.5, 0.7, E, 1.0), 1e-13) << E;
}

TEST(Transport, DotCurrentAgainstSimpson)
{
    auto cfg = ref::symmetric_dot(0.5, 4.0, 0.6);
    cfg.sample.hamiltonian(0, 0) = 0.2;
    const auto obs = lb_currents(cfg);
    const auto f = [&](double E) {
        return ref::dot_transmission(0.2, 0.5, 0.5, E, 1.0) *
               (ref::fermi_reference(4.0 * (E - 0.3)) - ref::fermi_reference(4.0 * (E + 0.3)));
    };
    // the integrand has square-root edges at +-2, so Simpson needs many panels
    const double J = ref::simpson(f, -2.0, 2.0, 400000);
    EXPECT_NEAR(obs.J(0), J, 1e-8);
    EXPECT_NEAR(obs.J(1), -J, 1e-8);
}

TEST(Transport, SumRulesOnRandomConfigs)
{
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto cfg = ref::random_config(rng, 1 + trial % 3, 2 + trial % 2);
        if (!check_spectral_condition(cfg).passed) continue;
        const auto obs = lb_currents(cfg);
        double energy = 0.0;
        for (int j = 0; j < cfg.n_leads(); ++j) energy += obs.Eflux(j) + cfg.leads[j].bias * obs.J(j);
        EXPECT_LE(std::abs(obs.J.sum()), 1e-8);
        EXPECT_LE(std::abs(energy), 1e-8);
        EXPECT_GE(obs.sigma, -1e-10);
        ++checked;
    }
    EXPECT_GE(checked, 8);
}

TEST(Transport, EquilibriumCarriesNothing)
{
    auto cfg = ref::two_site(0.0);
    for (auto& l : cfg.leads) {
        l.beta = 2.5;
        l.mu = 0.1;
        l.bias = 0.05;
    }
    const auto obs = lb_currents(cfg);
    EXPECT_LE(obs.J.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(obs.Eflux.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(std::abs(obs.sigma), 1e-10);
}

TEST(Transport, EntropyProductionPositivity)
{
    const auto rep = entropy_production(ref::symmetric_dot());
    EXPECT_GT(rep.sigma, 1e-4);
    EXPECT_TRUE(rep.strictly_positive);
    EXPECT_NEAR(rep.sigma, entropy_from_currents(ref::symmetric_dot(), rep.currents.J, rep.currents.Eflux), 1e-15);

    // leads on disjoint bands cannot exchange particles
    auto split = ref::symmetric_dot();
    split.leads[1].bias = 5.0;
    EXPECT_TRUE(transmission_vanishes(split, 0, 1));
    EXPECT_FALSE(entropy_production(split).strictly_positive);
}

TEST(Transport, OnsagerMatrixSymmetricWithZeroRowSums)
{
    SystemConfig cfg;
    cfg.sample.hamiltonian = CMatrix::Zero(2, 2);
    cfg.sample.hamiltonian << 0.2, -0.4, -0.4, -0.1;
    cfg.sample.pair_potential = RMatrix::Zero(2, 2);
    cfg.hopping = 1.0;
    const double phis[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {0.6, 0.8}};
    for (int j = 0; j < 3; ++j) {
        LeadSpec l;
        l.coupling = 0.3 + 0.1 * j;
        l.contact = CVector(2);
        l.contact << phis[j][0], phis[j][1];
        l.beta = 4.0;
        cfg.leads.push_back(l);
    }
    const auto ons = onsager_matrix(cfg);
    const double scale = ons.L.cwiseAbs().maxCoeff();
    EXPECT_GT(scale, 1e-3);
    EXPECT_LE((ons.L - ons.L.transpose()).cwiseAbs().maxCoeff(), 1e-5 * scale);
    EXPECT_LE(ons.L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-6 * scale);
    EXPECT_LT(ons.richardson_change, 1e-6 * scale);

    cfg.leads[0].mu = 0.1;
    EXPECT_THROW(onsager_matrix(cfg), ConfigError);
}

TEST(Transport, BreakpointsIncludeThresholdsAndFermiPoints)
{
    const auto pts = integration_breakpoints(ref::symmetric_dot());
    for (double p : {-2.0, 2.0, 0.1, -0.1})
        EXPECT_TRUE(std::any_of(pts.begin(), pts.end(), [&](double x) { return std::abs(x - p) < 1e-14; })) << p;
}
