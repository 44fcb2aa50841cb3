// integrator.hpp
//
// Fixed-step integrators for products of SO(3) and S^2 factors.
//
// A vector field returns, for every factor, its velocity in the ambient
// matrix or vector space: X hat(A) for a group factor and a tangent
// vector for a sphere factor.
//
//  - lie-euler:   X <- X exp(h A),  y <- exp(h hat(y x v)) y
//  - rk4-project: classical RK4 in the embedding, then every group factor
//                 is projected onto SO(3) and every sphere factor is
//                 renormalized.

#ifndef HOBS_INTEGRATOR_HPP
#define HOBS_INTEGRATOR_HPP

#include "hobs/manifold.hpp"
#include "hobs/systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hobs {

enum class IntegratorMethod { LieEuler, Rk4Project };

struct IntegratorSpec {
    IntegratorMethod method = IntegratorMethod::Rk4Project;
    double step = 1e-3;  // s
};

inline std::string to_string(IntegratorMethod m)
{
    return m == IntegratorMethod::LieEuler ? "lie-euler" : "rk4-project";
}

/// Raised when the state leaves the finite range.
class SimulationAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <int NG, int NS>
struct ProductState {
    std::array<Mat3, NG> groups;
    std::array<Vec3, NS> spheres;

    bool all_finite() const
    {
        return std::all_of(groups.begin(), groups.end(), [](const Mat3& m) { return m.allFinite(); }) &&
               std::all_of(spheres.begin(), spheres.end(), [](const Vec3& v) { return v.allFinite(); });
    }
};

namespace detail {

template <int NG, int NS>
ProductState<NG, NS> axpy(const ProductState<NG, NS>& x, double a, const ProductState<NG, NS>& d)
{
    ProductState<NG, NS> r;
    for (int i = 0; i < NG; ++i) {
        r.groups[i] = x.groups[i] + a * d.groups[i];
    }
    for (int i = 0; i < NS; ++i) {
        r.spheres[i] = x.spheres[i] + a * d.spheres[i];
    }
    return r;
}

/// One RK4 step over [t, t1]. The last stage sees the input's left limit at
/// t1, so a switch exactly at t1 does not leak into this step.
template <int NG, int NS, class Field>
ProductState<NG, NS> rk4_step(Field& field, double t, double t1, const ProductState<NG, NS>& x)
{
    const double h = t1 - t;
    const auto k1 = field(t, x);
    const auto k2 = field(t + 0.5 * h, axpy(x, 0.5 * h, k1));
    const auto k3 = field(t + 0.5 * h, axpy(x, 0.5 * h, k2));
    const auto k4 = field(std::nextafter(t1, t), axpy(x, h, k3));
    ProductState<NG, NS> r;
    for (int i = 0; i < NG; ++i) {
        r.groups[i] = nearest_rotation(
            x.groups[i] + (h / 6.0) * (k1.groups[i] + 2.0 * k2.groups[i] + 2.0 * k3.groups[i] + k4.groups[i]));
    }
    for (int i = 0; i < NS; ++i) {
        const Vec3 v =
            x.spheres[i] + (h / 6.0) * (k1.spheres[i] + 2.0 * k2.spheres[i] + 2.0 * k3.spheres[i] + k4.spheres[i]);
        r.spheres[i] = v / v.norm();
    }
    return r;
}

template <int NG, int NS, class Field>
ProductState<NG, NS> lie_euler_step(Field& field, double t, double h, const ProductState<NG, NS>& x)
{
    const auto d = field(t, x);
    ProductState<NG, NS> r;
    for (int i = 0; i < NG; ++i) {
        const Vec3 body = vee(skew_part(x.groups[i].transpose() * d.groups[i]));
        r.groups[i] = (GroupElement::orthonormalized(x.groups[i]) * group_exp(AlgebraElement(h * body))).matrix();
    }
    for (int i = 0; i < NS; ++i) {
        const Vec3 gen = x.spheres[i].cross(d.spheres[i]);
        const Vec3 v = group_exp(AlgebraElement(h * gen)).matrix() * x.spheres[i];
        r.spheres[i] = v / v.norm();
    }
    return r;
}

}  // namespace detail

/// Advances x from t to t + h. Input discontinuities inside the step are
/// stepped onto exactly so every sub-step sees a smooth input.
template <int NG, int NS, class Field>
ProductState<NG, NS> integrate_step(const IntegratorSpec& spec, Field& field, const InputSignal& input, double t,
                                    double h, const ProductState<NG, NS>& x)
{
    std::vector<double> cuts;
    input.breakpoints(t, t + h, cuts);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(t + h);

    ProductState<NG, NS> s = x;
    double now = t;
    for (double next : cuts) {
        const double dt = next - now;
        if (dt <= 0.0) {
            continue;
        }
        s = spec.method == IntegratorMethod::LieEuler ? detail::lie_euler_step(field, now, dt, s)
                                                      : detail::rk4_step(field, now, next, s);
        now = next;
    }
    if (!s.all_finite()) {
        throw SimulationAborted("non-finite state at t = " + std::to_string(t + h));
    }
    return s;
}

}  // namespace hobs

#endif  // HOBS_INTEGRATOR_HPP
