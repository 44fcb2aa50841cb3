// observer.hpp
//
// Gradient observers for the SO(3)/S^2 attitude problem.
//
// On the output space the observer is
//
//     yhat' = -u x yhat - grad_1 f(yhat, y),    f(yhat, y) = (k/2)|yhat - y|^2,
//
// and its lift to the group uses the horizontal distribution
// H(Xhat) = { Xhat hat(W) : W . yhat = 0 }:
//
//     Xhat' = Xhat u - (grad_1 f)^H = Xhat hat(u + k (y x yhat)).
//
// Sign conventions follow the action h(X, y) = X^T y, under which the
// tangent map sends Xhat hat(W) to -W x yhat. The horizontal generator of
// v is therefore W(v) = v x yhat, and grad_1 of the lifted cost is
// +k Xhat hat(yhat x y).

#ifndef HOBS_OBSERVER_HPP
#define HOBS_OBSERVER_HPP

#include "hobs/manifold.hpp"
#include "hobs/random.hpp"
#include "hobs/systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace hobs {

/// f(yhat, y) = (k/2)|yhat - y|^2 = k(1 - <yhat, y>), with gain k > 0 (1/s).
class CostFunction {
public:
    explicit CostFunction(double gain = 1.0) : k_(gain)
    {
        if (!(gain > 0.0) || !std::isfinite(gain)) {
            throw std::invalid_argument("CostFunction: gain must be positive");
        }
    }

    double gain() const { return k_; }

private:
    double k_;
};

inline double cost(const CostFunction& c, const OutputPoint& yhat, const OutputPoint& y)
{
    return 0.5 * c.gain() * (yhat.dir() - y.dir()).squaredNorm();
}

/// grad_1 f(yhat, y) = -k (I - yhat yhat^T) y.
inline TangentVector grad1_cost(const CostFunction& c, const OutputPoint& yhat, const OutputPoint& y)
{
    return TangentVector::project(yhat, -c.gain() * y.dir());
}

/// k (I - yhat yhat^T) y, the negative gradient.
inline TangentVector innovation_s2(const CostFunction& c, const OutputPoint& yhat, const OutputPoint& y)
{
    return TangentVector::project(yhat, c.gain() * y.dir());
}

/// The same innovation written as k (yhat x y) x yhat.
inline Vec3 innovation_s2_cross_form(const CostFunction& c, const OutputPoint& yhat, const OutputPoint& y)
{
    return c.gain() * yhat.dir().cross(y.dir()).cross(yhat.dir());
}

/// Internal model plus gradient innovation on S^2.
inline TangentVector projected_observer_field(const CostFunction& c, const OutputPoint& yhat,
                                              const OutputPoint& y, const AlgebraElement& u)
{
    return TangentVector(yhat, project_dynamics(yhat, u).vec() + innovation_s2(c, yhat, y).vec());
}

/// Body-frame generator W with zero component along yhat whose induced
/// output velocity -W x yhat equals v. Unique; W = v x yhat.
inline AlgebraElement omega_bar(const TangentVector& v)
{
    return AlgebraElement(v.vec().cross(v.base().dir()));
}

inline AlgebraElement omega_bar(const OutputPoint& yhat, const Vec3& v)
{
    if (std::abs(v.dot(yhat.dir())) > 1e-12 * std::max(1.0, v.norm())) {
        throw std::invalid_argument("omega_bar: vector is not tangent at yhat");
    }
    return omega_bar(TangentVector(yhat, v));
}

/// The right-invariant horizontal distribution determined by y0:
/// h = { hat(w) : w . y0 = 0 } and H(Xhat) = { hat(w) Xhat : hat(w) in h }.
struct HorizontalSubspace {
    OutputPoint y0;

    /// Tests whether the group tangent d at xhat lies in H(xhat).
    bool contains(const GroupElement& xhat, const Mat3& d, double tol = 1e-9) const
    {
        const Mat3 body = xhat.matrix().transpose() * d;
        if ((body + body.transpose()).norm() > tol * std::max(1.0, d.norm())) {
            return false;
        }
        const Vec3 w = xhat.matrix() * vee(skew_part(body));  // spatial generator
        return std::abs(w.dot(y0.dir())) <= tol * std::max(1.0, d.norm());
    }
};

/// Lift of v in T_yhat S^2 into H(xhat), yhat = act(xhat, y0).
inline Mat3 horizontal_lift(const HorizontalSubspace& h, const GroupElement& xhat, const TangentVector& v)
{
    if ((act(xhat, h.y0).dir() - v.base().dir()).norm() > kGroupTolerance) {
        throw std::invalid_argument("horizontal_lift: tangent vector is not based at act(xhat, y0)");
    }
    return xhat.matrix() * omega_bar(v).matrix();
}

/// Complementary filter generator u + k (y x yhat), yhat = act(xhat, y0);
/// the observer advances as Xhat' = Xhat hat(result).
inline AlgebraElement lifted_observer_field(const CostFunction& c, const GroupElement& xhat, const OutputPoint& y,
                                            const AlgebraElement& u, const OutputPoint& y0)
{
    const OutputPoint yhat = act(xhat, y0);
    return AlgebraElement(u.vec() + c.gain() * y.dir().cross(yhat.dir()));
}

/// Xhat u - (grad_1 f(yhat, y))^H, built from the output-space gradient.
inline Mat3 lifted_observer_field_gradient_form(const CostFunction& c, const GroupElement& xhat,
                                                const OutputPoint& y, const AlgebraElement& u,
                                                const OutputPoint& y0)
{
    const OutputPoint yhat = act(xhat, y0);
    return xhat.matrix() * u.matrix() - horizontal_lift(HorizontalSubspace{y0}, xhat, grad1_cost(c, yhat, y));
}

/// f~(Xhat, X) = f(h(Xhat, y0), h(X, y0)).
inline double lifted_cost(const CostFunction& c, const GroupElement& xhat, const GroupElement& x,
                          const OutputPoint& y0)
{
    return cost(c, act(xhat, y0), act(x, y0));
}

/// grad_1 f~ = k Xhat hat(yhat x y) under the metric below.
inline Mat3 grad1_lifted_cost(const CostFunction& c, const GroupElement& xhat, const GroupElement& x,
                              const OutputPoint& y0)
{
    const Vec3 yhat = act(xhat, y0).dir();
    const Vec3 y = act(x, y0).dir();
    return c.gain() * xhat.matrix() * hat(yhat.cross(y));
}

/// Right-invariant metric on SO(3) scaled by 1/2: <A, B> = tr(A^T B)/2.
/// Restricted to H(Xhat) it projects onto the embedded metric of S^2.
inline double group_metric(const Mat3& a, const Mat3& b) { return 0.5 * (a.transpose() * b).trace(); }

/// e = h(Xhat X^{-1}, y0). Equal to y0 iff Xhat and X are indistinguishable.
inline OutputPoint canonical_error_from_group(const GroupElement& xhat, const GroupElement& x,
                                              const OutputPoint& y0)
{
    return act(xhat * x.inverse(), y0);
}

/// Angle between yhat and y in [0, pi]. Computed as atan2(|yhat x y|, yhat.y),
/// which equals arccos(yhat.y) but keeps full relative precision near 0.
inline double error_angle(const OutputPoint& yhat, const OutputPoint& y)
{
    return std::atan2(yhat.dir().cross(y.dir()).norm(), yhat.dir().dot(y.dir()));
}

/// Solution of theta' = -k sin(theta), theta(0) = theta0 in [0, pi).
inline double error_angle_closed_form(double theta0, double k, double t)
{
    if (!(theta0 >= 0.0) || !(theta0 < std::numbers::pi)) {
        throw std::domain_error("error_angle_closed_form: theta0 must lie in [0, pi)");
    }
    return 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(-k * t));
}

// ---------------------------------------------------------------------------
// Costs used to exercise the symmetry requirements.

/// f_A(yhat, y) = (1/2)|A (yhat - y)|^2. Not invariant unless A^T A is a
/// multiple of the identity.
struct WeightedCost {
    Mat3 weight = Mat3::Identity();

    double operator()(const OutputPoint& yhat, const OutputPoint& y) const
    {
        return 0.5 * (weight * (yhat.dir() - y.dir())).squaredNorm();
    }

    TangentVector grad1(const OutputPoint& yhat, const OutputPoint& y) const
    {
        return TangentVector::project(yhat, weight.transpose() * weight * (yhat.dir() - y.dir()));
    }
};

/// The diagonal weight used as the symmetry-breaking negative control.
inline WeightedCost anisotropic_cost() { return WeightedCost{Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal()}; }

/// Invariant cost generated from a candidate fhat : S^2 -> R with its
/// minimum at y0: f(yhat, y) = fhat(h(Xhat X^{-1}, y0)) for representatives
/// Xhat, X given by `section`. fhat must be unchanged by rotations about y0,
/// otherwise the result depends on the representatives.
struct InvariantCost {
    std::function<double(const OutputPoint&)> fhat;
    OutputPoint y0;

    double operator()(const OutputPoint& yhat, const OutputPoint& y) const
    {
        const GroupElement xhat = section(yhat, y0);
        const GroupElement x = section(y, y0);
        return fhat(canonical_error_from_group(xhat, x, y0));
    }
};

inline InvariantCost make_invariant_cost(std::function<double(const OutputPoint&)> fhat, const OutputPoint& y0)
{
    return InvariantCost{std::move(fhat), y0};
}

/// max over random (S, yhat, y) of |S^T g(yhat, y) - g(S^T yhat, S^T y)|.
template <class Grad>
double check_innovation_equivariance(const Grad& grad1, int samples, std::uint64_t seed)
{
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const GroupElement s = random_rotation(rng);
        const OutputPoint yhat = random_output(rng);
        const OutputPoint y = random_output(rng);
        const Vec3 pushed = s.matrix().transpose() * grad1(yhat, y).vec();
        const Vec3 direct = grad1(act(s, yhat), act(s, y)).vec();
        worst = std::max(worst, (pushed - direct).norm());
    }
    return worst;
}

inline double check_innovation_equivariance(const CostFunction& c, int samples, std::uint64_t seed)
{
    return check_innovation_equivariance(
        [&c](const OutputPoint& a, const OutputPoint& b) { return grad1_cost(c, a, b); }, samples, seed);
}

}  // namespace hobs

#endif  // HOBS_OBSERVER_HPP
