#pragma once

// Occupation-number bases for the totally symmetric n-particle sectors of a
// finite M-mode one-particle space.
//
// Conventions used throughout the library:
//  * A sector basis state is an occupation vector m = (m_1, ..., m_M) with
//    m_i >= 0 and sum_i m_i = n.  The basis is ordered descending
//    lexicographically in (m_1, ..., m_M); for M = 2, n = 2 the order is
//    (2,0), (1,1), (0,2).  With this choice the 1-particle sector index
//    coincides with the mode index, so M x M matrices act on the 1-sector
//    without any reshuffling.
//  * The normalized symmetric state |m> expands in the n-fold tensor basis as
//    <e_{i_1} x ... x e_{i_n} | m> = sqrt(prod_i m_i! / n!) whenever the index
//    word (i_1,...,i_n) has occupation m, and 0 otherwise.
//  * dim of the n-sector is binom(n + M - 1, n).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mfl {

using Occupation = std::vector<int>;

// Exact binomial coefficient; throws std::overflow_error if it leaves uint64.
std::uint64_t binomial(int n, int k);

// binom(n + modes - 1, n), as a signed index for Eigen.
Eigen::Index sector_dim(int modes, int n);

class SectorBasis {
public:
    SectorBasis(int modes, int particles);

    int modes() const { return modes_; }
    int particles() const { return particles_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(states_.size()); }
    const Occupation& occupation(Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }
    const std::vector<Occupation>& states() const { return states_; }

    // Index of an occupation vector in the canonical order.
    Eigen::Index index(const Occupation& m) const;

private:
    int modes_;
    int particles_;
    std::vector<Occupation> states_; // ascending lexicographic
};

// Multinomial coefficient n! / prod_i m_i! (exact, n = sum m_i).
std::uint64_t multinomial(const Occupation& m);

// Coordinates of the product state psi^{(x)n} in the n-sector basis:
// <m|psi^{(x)n}> = sqrt(n!/prod m_i!) * prod_i psi_i^{m_i}.
// Its norm equals ||psi||^n.
Eigen::VectorXcd product_state(const Eigen::VectorXcd& psi, int n);

} // namespace mfl
