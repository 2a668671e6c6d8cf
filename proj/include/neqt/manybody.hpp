#pragma once

#include <cstdint>
#include <vector>

#include "neqt/model.hpp"

namespace neqt {

/// Fock space of N_sites spinless fermions split into particle-number sectors.
/// Basis states are bitmasks; bit x set means site x occupied.
class FockSpace {
public:
    explicit FockSpace(int sites);

    [[nodiscard]] int sites() const { return sites_; }
    [[nodiscard]] int sectors() const { return sites_ + 1; }
    [[nodiscard]] const std::vector<std::uint32_t>& basis(int particles) const { return basis_[particles]; }
    [[nodiscard]] int index(std::uint32_t state) const { return index_[state]; }

    /// Matrix of sum_{x,y} h(x,y) a^dagger_x a_y in a sector.
    [[nodiscard]] CMatrix one_body(int particles, const CMatrix& h) const;
    /// Matrix of a^dagger_b a_a in a sector (sparse in practice, returned dense).
    [[nodiscard]] CMatrix hopping(int particles, int a, int b) const;
    /// Diagonal of (1/2) sum_{x != y} u(x,y) n_x n_y.
    [[nodiscard]] RVector density_density(int particles, const RMatrix& u) const;

    /// Sign and target of a^dagger_b a_a |s>; returns false when the result vanishes.
    static bool apply_hopping(std::uint32_t s, int a, int b, std::uint32_t& out, double& sign);

private:
    int sites_;
    std::vector<std::vector<std::uint32_t>> basis_;
    std::vector<int> index_;
};

/// Sector-wise many-body Hamiltonian dGamma(h) + (1/2) sum u n n.
std::vector<CMatrix> many_body_hamiltonian(const FockSpace& fock, const CMatrix& h, const RMatrix& u);

} // namespace neqt
