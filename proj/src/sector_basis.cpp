#include "mfl/sector_basis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "mfl/errors.hpp"

namespace mfl {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n < 0) throw std::invalid_argument("binomial: negative n");
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n - k + i) / i is integral at every step
        std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        unsigned __int128 wide = static_cast<unsigned __int128>(r) * num;
        if (wide / num != r || wide > ~static_cast<unsigned __int128>(0) >> 64)
            throw std::overflow_error("binomial: exceeds 64 bits");
        r = static_cast<std::uint64_t>(wide) / static_cast<std::uint64_t>(i);
    }
    return r;
}

Eigen::Index sector_dim(int modes, int n) {
    if (modes < 1) throw std::invalid_argument("sector_dim: need at least one mode");
    if (n < 0) throw std::invalid_argument("sector_dim: negative particle number");
    std::uint64_t d = binomial(n + modes - 1, n);
    if (d > (1ULL << 30)) throw budget_error("sector_dim: dimension exceeds guard");
    return static_cast<Eigen::Index>(d);
}

namespace {

// Emits occupations in descending lexicographic order.
void fill_states(int modes, int remaining, Occupation& scratch, std::vector<Occupation>& out) {
    int pos = static_cast<int>(scratch.size());
    if (pos == modes - 1) {
        scratch.push_back(remaining);
        out.push_back(scratch);
        scratch.pop_back();
        return;
    }
    for (int c = remaining; c >= 0; --c) {
        scratch.push_back(c);
        fill_states(modes, remaining - c, scratch, out);
        scratch.pop_back();
    }
}

} // namespace

SectorBasis::SectorBasis(int modes, int particles) : modes_(modes), particles_(particles) {
    if (modes < 1) throw std::invalid_argument("SectorBasis: need at least one mode");
    if (particles < 0) throw std::invalid_argument("SectorBasis: negative particle number");
    states_.reserve(static_cast<std::size_t>(sector_dim(modes, particles)));
    Occupation scratch;
    scratch.reserve(static_cast<std::size_t>(modes));
    fill_states(modes, particles, scratch, states_);
}

Eigen::Index SectorBasis::index(const Occupation& m) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), m, std::greater<Occupation>());
    if (it == states_.end() || *it != m)
        throw std::invalid_argument("SectorBasis::index: occupation not in this sector");
    return static_cast<Eigen::Index>(it - states_.begin());
}

std::uint64_t multinomial(const Occupation& m) {
    int total = 0;
    std::uint64_t r = 1;
    for (int mi : m) {
        if (mi < 0) throw std::invalid_argument("multinomial: negative occupation");
        total += mi;
        std::uint64_t b = binomial(total, mi);
        unsigned __int128 wide = static_cast<unsigned __int128>(r) * b;
        if (wide > ~static_cast<unsigned __int128>(0) >> 64)
            throw std::overflow_error("multinomial: exceeds 64 bits");
        r = static_cast<std::uint64_t>(wide);
    }
    return r;
}

Eigen::VectorXcd product_state(const Eigen::VectorXcd& psi, int n) {
    const int modes = static_cast<int>(psi.size());
    SectorBasis basis(modes, n);
    Eigen::VectorXcd out(basis.dim());
    for (Eigen::Index i = 0; i < basis.dim(); ++i) {
        const Occupation& m = basis.occupation(i);
        std::complex<double> prod = 1.0;
        for (int mode = 0; mode < modes; ++mode)
            for (int c = 0; c < m[static_cast<std::size_t>(mode)]; ++c) prod *= psi[mode];
        out[i] = std::sqrt(static_cast<double>(multinomial(m))) * prod;
    }
    return out;
}

} // namespace mfl
