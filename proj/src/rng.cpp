#include "mfl/rng.hpp"

#include <cmath>

#include "mfl/sector_basis.hpp"
#include "mfl/sector_operator.hpp"

namespace mfl {

double SplitMix64::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t tag0, std::uint64_t tag1) {
    SplitMix64 g(seed);
    std::uint64_t s = g.next_u64();
    s ^= SplitMix64(tag0 ^ 0x8BADF00DDEADBEEFULL).next_u64();
    s ^= SplitMix64(tag1 ^ 0x0123456789ABCDEFULL).next_u64();
    return SplitMix64(s);
}

Eigen::MatrixXcd random_hermitian_sector(std::uint64_t seed, int p, int modes) {
    SplitMix64 g = SplitMix64::stream(seed, static_cast<std::uint64_t>(p),
                                      static_cast<std::uint64_t>(modes));
    const Eigen::Index d = sector_dim(modes, p);
    Eigen::MatrixXcd raw(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            raw(i, j) = std::complex<double>(g.next_normal(), g.next_normal());
    Eigen::MatrixXcd herm = 0.5 * (raw + raw.adjoint());
    double norm = spectral_norm(herm);
    if (norm > 0.0) herm /= norm;
    return herm;
}

} // namespace mfl
