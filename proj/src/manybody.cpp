#include "neqt/manybody.hpp"

#include <bit>
#include <stdexcept>

namespace neqt {

FockSpace::FockSpace(int sites) : sites_(sites)
{
    if (sites < 0 || sites > 24) throw std::invalid_argument("Fock space size out of range");
    basis_.resize(sites + 1);
    index_.assign(std::size_t{1} << sites, -1);
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << sites); ++s) {
        auto& b = basis_[std::popcount(s)];
        index_[s] = static_cast<int>(b.size());
        b.push_back(s);
    }
}

bool FockSpace::apply_hopping(std::uint32_t s, int a, int b, std::uint32_t& out, double& sign)
{
    const std::uint32_t ma = std::uint32_t{1} << a, mb = std::uint32_t{1} << b;
    if (!(s & ma)) return false;
    std::uint32_t t = s ^ ma;
    int parity = std::popcount(s & (ma - 1));
    if (t & mb) return false;
    parity += std::popcount(t & (mb - 1));
    out = t | mb;
    sign = (parity % 2) ? -1.0 : 1.0;
    return true;
}

CMatrix FockSpace::one_body(int particles, const CMatrix& h) const
{
    const auto& b = basis_[particles];
    const auto dim = static_cast<Eigen::Index>(b.size());
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const std::uint32_t s = b[col];
        for (int y = 0; y < sites_; ++y) {
            if (!(s & (std::uint32_t{1} << y))) continue;
            for (int x = 0; x < sites_; ++x) {
                const cplx hxy = h(x, y);
                if (hxy == cplx{}) continue;
                std::uint32_t t;
                double sign;
                if (x == y) {
                    out(col, col) += hxy;
                } else if (apply_hopping(s, y, x, t, sign)) {
                    out(index_[t], col) += sign * hxy;
                }
            }
        }
    }
    return out;
}

CMatrix FockSpace::hopping(int particles, int a, int b) const
{
    const auto& basis = basis_[particles];
    const auto dim = static_cast<Eigen::Index>(basis.size());
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const std::uint32_t s = basis[col];
        if (a == b) {
            if (s & (std::uint32_t{1} << a)) out(col, col) = 1.0;
            continue;
        }
        std::uint32_t t;
        double sign;
        if (apply_hopping(s, a, b, t, sign)) out(index_[t], col) = sign;
    }
    return out;
}

RVector FockSpace::density_density(int particles, const RMatrix& u) const
{
    const auto& basis = basis_[particles];
    RVector out = RVector::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const std::uint32_t s = basis[i];
        double e = 0.0;
        for (int x = 0; x < sites_; ++x) {
            if (!(s & (std::uint32_t{1} << x))) continue;
            for (int y = 0; y < sites_; ++y)
                if (y != x && (s & (std::uint32_t{1} << y))) e += 0.5 * u(x, y);
        }
        out(static_cast<Eigen::Index>(i)) = e;
    }
    return out;
}

std::vector<CMatrix> many_body_hamiltonian(const FockSpace& fock, const CMatrix& h, const RMatrix& u)
{
    std::vector<CMatrix> out;
    for (int N = 0; N < fock.sectors(); ++N) {
        CMatrix H = fock.one_body(N, h);
        H.diagonal() += fock.density_density(N, u).cast<cplx>();
        out.push_back(std::move(H));
    }
    return out;
}

} // namespace neqt
