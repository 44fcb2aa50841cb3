// verify.hpp
//
// Randomized residual checks of the observer construction. Each property
// reports the worst residual over its samples next to the bound it must
// respect; the CLI `verify` mode serializes these reports.

#ifndef HOBS_VERIFY_HPP
#define HOBS_VERIFY_HPP

#include "hobs/observer.hpp"
#include "hobs/random.hpp"
#include "hobs/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <cstdint>
#include <string>
#include <vector>

namespace hobs {

inline constexpr double kFiniteDifferenceStep = 1e-6;

struct PropertyResult {
    enum class Bound { AtMost, AtLeast };

    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    Bound bound = Bound::AtMost;
    bool pass = false;

    static PropertyResult at_most(std::string name, double value, double tol)
    {
        return {std::move(name), value, tol, Bound::AtMost, value <= tol};
    }
    static PropertyResult at_least(std::string name, double value, double tol)
    {
        return {std::move(name), value, tol, Bound::AtLeast, value >= tol};
    }
};

inline bool all_pass(const std::vector<PropertyResult>& rs)
{
    return std::all_of(rs.begin(), rs.end(), [](const PropertyResult& r) { return r.pass; });
}

/// Central difference of the output of t -> act(X exp(t hat(w)), y0) at 0.
inline Vec3 projected_velocity_fd(const GroupElement& x, const Vec3& w, const OutputPoint& y0,
                                  double eps = kFiniteDifferenceStep)
{
    const Vec3 plus = act(x * group_exp(AlgebraElement(eps * w)), y0).dir();
    const Vec3 minus = act(x * group_exp(AlgebraElement(-eps * w)), y0).dir();
    return (plus - minus) / (2.0 * eps);
}

/// Runs every residual check with `samples` random draws each.
inline std::vector<PropertyResult> run_verification(double k, int samples, std::uint64_t seed)
{
    const CostFunction c(k);
    const double eps = kFiniteDifferenceStep;
    std::vector<PropertyResult> out;
    Rng rng(seed);

    out.push_back(PropertyResult::at_most("innovation_equivariance",
                                          check_innovation_equivariance(c, samples, derive_seed(seed, 1)), 1e-12));
    {
        const WeightedCost control = anisotropic_cost();
        const double r = check_innovation_equivariance(
            [&](const OutputPoint& a, const OutputPoint& b) { return control.grad1(a, b); }, samples,
            derive_seed(seed, 2));
        out.push_back(PropertyResult::at_least("non_invariant_control_equivariance", r, 1e-3));
    }

    double action = 0.0, section_res = 0.0, repr = 0.0;
    double cost_forms = 0.0, cross_form = 0.0, metric = 0.0, omega_bar_res = 0.0;
    double round_trip = 0.0, prop4 = 0.0, two_forms = 0.0, horizontal = 0.0;
    double fd_cost = 0.0, fd_lifted = 0.0, right_inv = 0.0, inv_cost = 0.0;

    const InvariantCost generated = make_invariant_cost(
        [k](const OutputPoint& z) { return k * (1.0 - z.dir().z()); }, OutputPoint::e3());

    for (int i = 0; i < samples; ++i) {
        const GroupElement xa = random_rotation(rng);
        const GroupElement xb = random_rotation(rng);
        const GroupElement s = random_rotation(rng);
        const OutputPoint y0 = random_output(rng);
        const OutputPoint yhat = random_output(rng);
        const OutputPoint y = random_output(rng);
        const AlgebraElement u(gaussian_vec3(rng));

        action = std::max(action, (act(xa, act(xb, yhat)).dir() - act(xb * xa, yhat).dir()).norm());
        if ((y.dir() + y0.dir()).norm() > 1e-6) {
            section_res = std::max(section_res, (act(section(y, y0), y0).dir() - y.dir()).norm());
        }

        // Two representatives of y differ by a stabiliser element on the left.
        {
            const GroupElement r1 = section(y, OutputPoint::e3());
            const GroupElement r2 = rot_z(2.0 * std::numbers::pi * std::uniform_real_distribution<double>()(rng)) * r1;
            const Vec3 v1 = projected_velocity_fd(r1, u.vec(), OutputPoint::e3());
            const Vec3 v2 = projected_velocity_fd(r2, u.vec(), OutputPoint::e3());
            const Vec3 v = project_dynamics(y, u).vec();
            repr = std::max({repr, (v1 - v2).norm(), (v1 - v).norm()});
        }

        cost_forms = std::max(cost_forms, std::abs(cost(c, yhat, y) - k * (1.0 - yhat.dir().dot(y.dir()))));
        cross_form = std::max(cross_form,
                              (innovation_s2(c, yhat, y).vec() - innovation_s2_cross_form(c, yhat, y)).norm());

        const TangentVector v = random_tangent(rng, yhat);
        const TangentVector w = random_tangent(rng, yhat);
        const Vec3 wv = omega_bar(v).vec();
        const Vec3 ww = omega_bar(w).vec();
        metric = std::max(metric, std::abs(riemannian_inner(v, w) - 0.5 * (hat(wv).transpose() * hat(ww)).trace()));
        omega_bar_res = std::max({omega_bar_res, (-wv.cross(yhat.dir()) - v.vec()).norm(),
                                  std::abs(wv.dot(yhat.dir()))});

        // Lift at a representative of yhat for the reference y0.
        const GroupElement xhat = section(yhat, y0);
        const HorizontalSubspace hs{y0};
        const Mat3 lift = horizontal_lift(hs, xhat, v);
        round_trip = std::max(round_trip, (projected_velocity_fd(xhat, omega_bar(v).vec(), y0) - v.vec()).norm());
        horizontal = std::max(horizontal, hs.contains(xhat, lift) ? 0.0 : 1.0);

        const GroupElement x = xa;
        const OutputPoint yx = act(x, y0);
        prop4 = std::max(prop4, (grad1_lifted_cost(c, xhat, x, y0) -
                                 horizontal_lift(hs, xhat, grad1_cost(c, yhat, yx)))
                                    .norm());
        two_forms = std::max(two_forms, (xhat.matrix() * lifted_observer_field(c, xhat, yx, u, y0).matrix() -
                                         lifted_observer_field_gradient_form(c, xhat, yx, u, y0))
                                            .norm());

        // <grad f, w> against a central difference along the great circle.
        {
            const double fp = cost(c, sphere_exp(TangentVector(yhat, eps * w.vec())), y);
            const double fm = cost(c, sphere_exp(TangentVector(yhat, -eps * w.vec())), y);
            fd_cost = std::max(fd_cost, std::abs((fp - fm) / (2.0 * eps) -
                                                 riemannian_inner(grad1_cost(c, yhat, y), w)));
        }
        {
            const Vec3 dir = gaussian_vec3(rng);
            const double fp = lifted_cost(c, xhat * group_exp(AlgebraElement(eps * dir)), x, y0);
            const double fm = lifted_cost(c, xhat * group_exp(AlgebraElement(-eps * dir)), x, y0);
            const double pairing = group_metric(grad1_lifted_cost(c, xhat, x, y0), xhat.matrix() * hat(dir));
            fd_lifted = std::max(fd_lifted, std::abs((fp - fm) / (2.0 * eps) - pairing));
        }

        right_inv = std::max(right_inv,
                             std::abs(lifted_cost(c, xhat * s, x * s, y0) - lifted_cost(c, xhat, x, y0)));

        if (error_angle(yhat, OutputPoint::e3().antipode()) > 1e-3 &&
            error_angle(y, OutputPoint::e3().antipode()) > 1e-3 &&
            error_angle(act(s, yhat), OutputPoint::e3().antipode()) > 1e-3 &&
            error_angle(act(s, y), OutputPoint::e3().antipode()) > 1e-3) {
            inv_cost = std::max(inv_cost, std::abs(generated(act(s, yhat), act(s, y)) - generated(yhat, y)));
        }
    }

    out.push_back(PropertyResult::at_most("right_action_law", action, 1e-12));
    out.push_back(PropertyResult::at_most("section_consistency", section_res, 1e-9));
    out.push_back(PropertyResult::at_most("projection_representative_independence", repr, 1e-6));
    out.push_back(PropertyResult::at_most("cost_closed_forms", cost_forms, 1e-12));
    out.push_back(PropertyResult::at_most("innovation_cross_form", cross_form, 1e-12));
    out.push_back(PropertyResult::at_most("metric_identity", metric, 1e-12));
    out.push_back(PropertyResult::at_most("omega_bar_constraints", omega_bar_res, 1e-12));
    out.push_back(PropertyResult::at_most("lift_round_trip", round_trip, 1e-6));
    out.push_back(PropertyResult::at_most("lift_is_horizontal", horizontal, 0.0));
    out.push_back(PropertyResult::at_most("lifted_gradient_identity", prop4, 1e-12));
    out.push_back(PropertyResult::at_most("observer_two_forms", two_forms, 1e-12));
    out.push_back(PropertyResult::at_most("gradient_fd_cost", fd_cost, 1e-5));
    out.push_back(PropertyResult::at_most("gradient_fd_lifted_cost", fd_lifted, 1e-5));
    out.push_back(PropertyResult::at_most("lifted_cost_right_invariance", right_inv, 1e-12));
    out.push_back(PropertyResult::at_most("invariant_cost_construction", inv_cost, 1e-9));
    return out;
}

}  // namespace hobs

#endif  // HOBS_VERIFY_HPP
