#include <gtest/gtest.h>

#include "neqt/model.hpp"
#include "oracles.hpp"

using namespace neqt;

namespace {

bool mentions(const ValidationReport& r, const std::string& text)
{
    for (const auto& v : r.violations)
        if (v.find(text) != std::string::npos) return true;
    return false;
}

} // namespace

TEST(Model, SymmetricDotIsValid)
{
    EXPECT_TRUE(validate(ref::symmetric_dot()).ok());
    EXPECT_TRUE(validate(ref::two_site(0.1)).ok());
}

TEST(Model, NonHermitianSampleRejected)
{
    auto cfg = ref::two_site(0.0);
    cfg.sample.hamiltonian(0, 1) = cplx(0.0, 1.0);
    EXPECT_TRUE(mentions(validate(cfg), "h_S hermiticity"));
    EXPECT_THROW(require_valid(cfg), ConfigError);
}

TEST(Model, PairPotentialConstraints)
{
    auto cfg = ref::two_site(0.1);
    cfg.sample.pair_potential(0, 0) = 0.5;
    EXPECT_TRUE(mentions(validate(cfg), "zero diagonal of w"));

    cfg = ref::two_site(0.1);
    cfg.sample.pair_potential(0, 1) = 0.3;
    EXPECT_TRUE(mentions(validate(cfg), "symmetry of w"));

    cfg = ref::two_site(0.1);
    cfg.sample.pair_potential(0, 1) = cfg.sample.pair_potential(1, 0) = 1.5;
    EXPECT_TRUE(mentions(validate(cfg), "normalization |w| <= 1"));
}

TEST(Model, ContactMustBeUnitVector)
{
    auto cfg = ref::two_site(0.0);
    cfg.leads[1].contact(1) = 0.9;
    EXPECT_TRUE(mentions(validate(cfg), "unit norm of phi"));
}

TEST(Model, PartitionFreeNeedsCommonTemperature)
{
    auto cfg = ref::symmetric_dot();
    cfg.scenario = Scenario::partition_free;
    cfg.beta_eq = 20.0;
    cfg.mu_eq = 0.0;
    EXPECT_FALSE(validate(cfg).ok());
    for (auto& lead : cfg.leads) lead.mu = 0.0;
    EXPECT_TRUE(validate(cfg).ok());
}

TEST(Model, LayoutOrdersSampleThenLeads)
{
    SiteLayout layout{2, 3, 5};
    EXPECT_EQ(layout.dimension(), 17);
    EXPECT_EQ(layout.sample(1), 1);
    EXPECT_EQ(layout.lead(0, 0), 2);
    EXPECT_EQ(layout.lead(2, 4), 16);
}

TEST(Model, TruncatedHamiltonianMatchesDirectConstruction)
{
    auto cfg = ref::two_site(0.0);
    cfg.leads[0].bias = 0.25;
    cfg.leads[1].contact = CVector::Zero(2);
    cfg.leads[1].contact << cplx(0.6, 0.0), cplx(0.0, 0.8);
    const CMatrix h = effective_single_particle_hamiltonian(cfg, 6);
    const CMatrix ref = CMatrix(ref::chain_hamiltonian(cfg, 6));
    EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Model, PartsRecombine)
{
    auto cfg = ref::symmetric_dot();
    cfg.leads[0].bias = 0.1;
    const auto parts = hamiltonian_parts(cfg, 4);
    const CMatrix decoupled = CMatrix(parts.combine(0.0, 0.0));
    EXPECT_EQ(decoupled(0, parts.layout.lead(0, 0)), cplx{});
    EXPECT_EQ(CMatrix(parts.combine(1.0, 0.0))(parts.layout.lead(0, 2), parts.layout.lead(0, 2)), cplx{});
    EXPECT_NEAR(CMatrix(parts.combine(1.0, 1.0))(parts.layout.lead(0, 2), parts.layout.lead(0, 2)).real(), 0.1, 1e-15);
    EXPECT_NEAR(std::abs(CMatrix(parts.combine(0.5, 1.0))(0, parts.layout.lead(1, 0))), 0.2, 1e-15);
    EXPECT_THROW(hamiltonian_parts(cfg, 0), std::invalid_argument);
}

TEST(Model, RealityDetection)
{
    auto cfg = ref::two_site(0.0);
    EXPECT_TRUE(cfg.is_real());
    cfg.leads[0].contact(0) = cplx(0.0, 1.0);
    EXPECT_FALSE(cfg.is_real());
}
