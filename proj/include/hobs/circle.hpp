// circle.hpp
//
// SO(2) acting on S^1, the scalar instance. Group elements and outputs are
// angles wrapped to (-pi, pi]; the right action is h(phi, y) = y - phi, the
// planar analogue of X^T y. The stabiliser is trivial, so the observer
// recovers the full state.

#ifndef HOBS_CIRCLE_HPP
#define HOBS_CIRCLE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hobs::circle {

/// Wraps an angle to (-pi, pi].
inline double wrap(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

/// Rotation angle in SO(2).
struct GroupAngle {
    double value = 0.0;
    friend GroupAngle operator*(GroupAngle a, GroupAngle b) { return {wrap(a.value + b.value)}; }
    GroupAngle inverse() const { return {wrap(-value)}; }
};

/// Point on S^1.
struct OutputAngle {
    double value = 0.0;
};

inline GroupAngle group_exp(double omega) { return {wrap(omega)}; }

inline OutputAngle act(GroupAngle x, OutputAngle y) { return {wrap(y.value - x.value)}; }

inline bool in_stabiliser(GroupAngle x, OutputAngle y0)
{
    return std::abs(wrap(act(x, y0).value - y0.value)) <= 1e-9;
}

/// Projected plant velocity for body rate omega.
inline double project_dynamics(double omega) { return -omega; }

/// f(yhat, y) = k (1 - cos(yhat - y)).
inline double cost(double k, OutputAngle yhat, OutputAngle y) { return k * (1.0 - std::cos(yhat.value - y.value)); }

/// Gradient in the first argument under the invariant metric d(theta)^2.
inline double grad1_cost(double k, OutputAngle yhat, OutputAngle y) { return k * std::sin(yhat.value - y.value); }

/// Gradient observer on S^1: yhat' = -omega - grad1 f(yhat, y).
inline double projected_observer_field(double k, OutputAngle yhat, OutputAngle y, double omega)
{
    return project_dynamics(omega) - grad1_cost(k, yhat, y);
}

/// Lifted observer on SO(2): phihat' = omega + k sin(phi - phihat), written
/// in terms of outputs since yhat - y = phi - phihat.
inline double lifted_observer_field(double k, OutputAngle yhat, OutputAngle y, double omega)
{
    return omega + grad1_cost(k, yhat, y);
}

/// Signed output error delta(t) = yhat - y solving delta' = -k sin(delta).
inline double error_closed_form(double delta0, double k, double t)
{
    const double d = wrap(delta0);
    if (std::abs(d) >= std::numbers::pi) {
        throw std::domain_error("circle::error_closed_form: antipodal equilibrium");
    }
    return 2.0 * std::atan(std::tan(0.5 * d) * std::exp(-k * t));
}

}  // namespace hobs::circle

#endif  // HOBS_CIRCLE_HPP
