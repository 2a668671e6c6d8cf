#include <gtest/gtest.h>

#include "neqt/correlators.hpp"
#include "neqt/oracle.hpp"
#include "neqt/transport.hpp"
#include "oracles.hpp"

using namespace neqt;

namespace {

OracleConfig small_run(int L, double dt)
{
    OracleConfig oc;
    oc.lead_length = L;
    oc.dt = dt;
    return oc;
}

SystemConfig partition_free_dot(double v)
{
    auto cfg = ref::symmetric_dot(0.4, 5.0, 0.0);
    cfg.scenario = Scenario::partition_free;
    cfg.beta_eq = 5.0;
    cfg.mu_eq = 0.0;
    cfg.leads[0].bias = v;
    cfg.leads[1].bias = -v;
    return cfg;
}

} // namespace

TEST(Oracle, RampProfiles)
{
    for (auto p : {RampProfile::linear, RampProfile::smooth}) {
        EXPECT_EQ(ramp_profile(p, -0.5), 1.0);
        EXPECT_EQ(ramp_profile(p, 0.0), 1.0);
        EXPECT_EQ(ramp_profile(p, 1.0), 0.0);
        EXPECT_EQ(ramp_profile(p, 2.0), 0.0);
        EXPECT_NEAR(ramp_profile(p, 0.5), 0.5, 1e-15);
    }
    EXPECT_EQ(ramp_profile(RampProfile::sudden, 0.5), 1.0);
    EXPECT_EQ(parse_ramp_profile("smooth"), RampProfile::smooth);
    EXPECT_EQ(to_string(RampProfile::linear), "linear");
    EXPECT_THROW(parse_ramp_profile("cubic"), ConfigError);
}

TEST(Oracle, PlateauFitRecoversLine)
{
    std::vector<double> t;
    RVector y(101);
    for (int i = 0; i <= 100; ++i) {
        t.push_back(i);
        y(i) = 2.0 + 1e-4 * (i - 50);
    }
    const auto p = fit_plateau(t, y, 20.0, 80.0);
    EXPECT_NEAR(p.value, 2.0, 1e-12);
    EXPECT_NEAR(p.slope, 1e-4, 1e-12);
    EXPECT_EQ(p.samples, 61);
    EXPECT_TRUE(p.accepted);
    y *= 0.0;
    for (int i = 0; i <= 100; ++i) y(i) = 0.01 * i;
    EXPECT_FALSE(fit_plateau(t, y, 20.0, 80.0).accepted);
}

TEST(Oracle, PartitionedStartCarriesNoCurrent)
{
    const auto run = evolve_free(ref::symmetric_dot(), small_run(100, 1.0));
    EXPECT_EQ(run.charge(0, 0), 0.0);
    EXPECT_EQ(run.charge(0, 1), 0.0);
    EXPECT_NEAR(run.density(0, 0), 0.5, 1e-12);
    EXPECT_LE(run.particle_drift, 1e-9);
    EXPECT_LE(run.hermiticity_error, 1e-10);
}

TEST(Oracle, PlateauApproachesLandauerButtiker)
{
    const auto cfg = ref::symmetric_dot();
    const double lb = lb_currents(cfg).J(0);
    const auto run = evolve_free(cfg, small_run(200, 1.0));
    ASSERT_TRUE(run.plateaus_accepted());
    EXPECT_NEAR(run.charge_plateaus[0].value, lb, 0.05 * std::abs(lb));
    EXPECT_NEAR(run.charge_plateaus[1].value, -lb, 0.05 * std::abs(lb));
}

TEST(Oracle, PlateauDensityMatchesNessDensity)
{
    const auto cfg = ref::two_site(0.0);
    const auto rho = ness_density_matrix(cfg, {Site::sample(0), Site::sample(1)});
    const auto run = evolve_free(cfg, small_run(300, 1.0));
    for (int x = 0; x < 2; ++x) {
        const auto p = fit_plateau(run.times, run.density.col(x), 150.0, 270.0);
        EXPECT_NEAR(p.value, rho.values(x, x).real(), 2e-3);
    }
}

TEST(Oracle, PartitionFreeEquilibriumIsStationary)
{
    const auto run = evolve_free(partition_free_dot(0.0), small_run(120, 0.5));
    EXPECT_LT(run.charge.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(run.energy.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Oracle, PartitionFreeBiasDrivesCurrent)
{
    const auto cfg = partition_free_dot(0.1);
    const double lb = lb_currents(cfg).J(0);
    const auto run = evolve_free(cfg, small_run(300, 1.0));
    EXPECT_NEAR(run.charge_plateaus[0].value, lb, 0.05 * std::abs(lb));
}

TEST(Oracle, RecurrenceGuard)
{
    auto oc = small_run(50, 1.0);
    oc.t_max = 80.0;
    EXPECT_THROW(evolve_free(ref::symmetric_dot(), oc), OracleRejection);
    oc.t_max = -1.0;
    oc.ramp = RampProfile::linear;
    oc.ramp_duration = 40.0;
    EXPECT_THROW(evolve_adiabatic(ref::symmetric_dot(), oc), OracleRejection);
    oc.enforce_recurrence = false;
    oc.ramp_step = 2.0;
    EXPECT_NO_THROW(evolve_adiabatic(ref::symmetric_dot(), oc));
}

TEST(Oracle, FreeRequiresNonInteracting)
{
    EXPECT_THROW(evolve_free(ref::two_site(0.1), small_run(4, 0.1)), ConfigError);
}

TEST(Oracle, DimensionCapEnforced)
{
    EXPECT_THROW(evolve_interacting(ref::two_site(0.1), small_run(7, 0.1)), DimensionCap);
}

TEST(Oracle, ExactDiagonalizationMatchesOneParticleEvolution)
{
    auto oc = small_run(4, 0.1);
    oc.enforce_recurrence = false;
    oc.t_max = 6.0;
    const auto free = evolve_free(ref::two_site(0.0), oc);
    const auto ed = evolve_interacting(ref::two_site(0.0), oc);
    ASSERT_EQ(free.times.size(), ed.times.size());
    EXPECT_LT((free.charge - ed.charge).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((free.energy - ed.energy).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((free.density - ed.density).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Oracle, InteractingRunConservesParticles)
{
    auto oc = small_run(4, 0.1);
    oc.enforce_recurrence = false;
    oc.sample_state = SampleState::random;
    oc.seed = 5;
    const auto ed = evolve_interacting(ref::two_site(0.3), oc);
    EXPECT_LE(ed.particle_drift, 1e-9);
    EXPECT_LE(ed.hermiticity_error, 1e-10);
}

TEST(Oracle, InteractingPartitionFreeEquilibriumIsStationary)
{
    auto cfg = ref::two_site(0.3);
    cfg.scenario = Scenario::partition_free;
    cfg.beta_eq = 2.0;
    cfg.mu_eq = 0.1;
    for (auto& l : cfg.leads) {
        l.beta = 2.0;
        l.mu = 0.1;
    }
    auto oc = small_run(4, 0.2);
    oc.enforce_recurrence = false;
    const auto ed = evolve_interacting(cfg, oc);
    EXPECT_LT(ed.charge.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Oracle, MeanFieldTrajectoryReducesToFreeAtZeroCoupling)
{
    auto oc = small_run(4, 0.1);
    oc.enforce_recurrence = false;
    oc.t_max = 5.0;
    const auto free = evolve_free(ref::two_site(0.0), oc);
    const auto hf = evolve_hartree_fock_td(ref::two_site(0.0), oc);
    EXPECT_LT((free.charge - hf.charge).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Oracle, SuddenProtocolEqualsDirectRun)
{
    const auto oc = small_run(80, 1.0);
    const auto a = evolve_free(ref::symmetric_dot(), oc);
    const auto b = evolve_adiabatic(ref::symmetric_dot(), oc);
    EXPECT_LT((a.charge - b.charge).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Oracle, RampStepConvergence)
{
    auto oc = small_run(200, 1.0);
    oc.ramp = RampProfile::linear;
    oc.ramp_duration = 60.0;
    oc.ramp_step = 2.0;
    const double coarse = evolve_adiabatic(ref::symmetric_dot(), oc).charge_plateaus[0].value;
    oc.ramp_step = 1.0;
    const double fine = evolve_adiabatic(ref::symmetric_dot(), oc).charge_plateaus[0].value;
    EXPECT_LT(std::abs(coarse - fine), 1e-3 * std::abs(fine));
}

TEST(Oracle, RampedEquilibriumStaysQuiet)
{
    auto oc = small_run(120, 1.0);
    oc.ramp = RampProfile::smooth;
    oc.ramp_duration = 40.0;
    oc.ramp_step = 1.0;
    const auto run = evolve_adiabatic(partition_free_dot(0.0), oc);
    EXPECT_LT(run.charge.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Oracle, IdenticalSampleStatesHaveNoSpread)
{
    const auto half = sample_initial_density(1, OracleConfig{});
    const auto rep = initial_state_independence(ref::symmetric_dot(), small_run(100, 1.0), {half, half});
    EXPECT_EQ(rep.spread, 0.0);
    ASSERT_EQ(rep.plateaus.size(), 2u);
}

TEST(Oracle, SampleStates)
{
    OracleConfig oc;
    EXPECT_LT((sample_initial_density(2, oc) - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
    oc.sample_state = SampleState::full;
    EXPECT_LT((sample_initial_density(2, oc) - CMatrix::Identity(2, 2)).norm(), 1e-15);
    oc.sample_state = SampleState::random;
    oc.seed = 9;
    const CMatrix r = sample_initial_density(3, oc);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-12);
    EXPECT_LT((r - sample_initial_density(3, oc)).norm(), 1e-15);
    EXPECT_EQ(parse_sample_state("empty"), SampleState::empty);
}
