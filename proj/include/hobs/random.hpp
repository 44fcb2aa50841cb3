// random.hpp
//
// Seeded samplers for the sphere and the rotation group. Everything draws
// from std::mt19937_64 so runs are reproducible for a given seed.

#ifndef HOBS_RANDOM_HPP
#define HOBS_RANDOM_HPP

#include "hobs/manifold.hpp"

#include <cstdint>
#include <random>

namespace hobs {

using Rng = std::mt19937_64;

/// Independent stream seed for run `index` of a sweep seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 finalizer over a golden-ratio stride
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Vec3 gaussian_vec3(Rng& rng, double sigma = 1.0)
{
    std::normal_distribution<double> n(0.0, sigma);
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    return {x, y, z};
}

/// Uniform on S^2 (normalized Gaussian triple).
inline OutputPoint random_output(Rng& rng)
{
    for (;;) {
        const Vec3 g = gaussian_vec3(rng);
        if (g.norm() > 1e-12) {
            return OutputPoint::normalize(g);
        }
    }
}

/// Haar-uniform on SO(3): QR of a Gaussian matrix with the sign of R's
/// diagonal folded into Q, then a column flip if det(Q) = -1.
inline GroupElement random_rotation(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Mat3 g;
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r) {
            g(r, c) = n(rng);
        }
    }
    Eigen::HouseholderQR<Mat3> qr(g);
    Mat3 q = qr.householderQ();
    const Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 3; ++i) {
        if (r(i, i) < 0.0) {
            q.col(i) = -q.col(i);
        }
    }
    if (q.determinant() < 0.0) {
        q.col(0) = -q.col(0);
    }
    return GroupElement::project(q);
}

/// Uniform tangent direction at y scaled by a Gaussian magnitude.
inline TangentVector random_tangent(Rng& rng, const OutputPoint& y, double sigma = 1.0)
{
    return TangentVector::project(y, gaussian_vec3(rng, sigma));
}

}  // namespace hobs

#endif  // HOBS_RANDOM_HPP
