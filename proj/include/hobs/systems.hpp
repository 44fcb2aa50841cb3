// systems.hpp
//
// The plant: left-invariant kinematics X' = X u on SO(3), the output
// y = h(X, y0), the projected system on S^2 and the admissible input class.

#ifndef HOBS_SYSTEMS_HPP
#define HOBS_SYSTEMS_HPP

#include "hobs/manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

namespace hobs {

class InputSignal;

namespace signal {

struct Constant {
    Vec3 value = Vec3::Zero();
};

/// amplitude * sin(2 pi f t + phase)
struct Sinusoid {
    Vec3 amplitude = Vec3::Zero();
    double frequency_hz = 0.0;
    double phase = 0.0;
};

/// values[i] on [switch_times[i-1], switch_times[i]), right-continuous.
/// values.size() == switch_times.size() + 1.
struct Piecewise {
    std::vector<double> switch_times;
    std::vector<Vec3> values;
};

struct Sum {
    std::vector<InputSignal> terms;
};

}  // namespace signal

/// Angular-velocity input u(t), evaluable for t >= 0.
class InputSignal {
public:
    using Variant = std::variant<signal::Constant, signal::Sinusoid, signal::Piecewise, signal::Sum>;

    InputSignal() : v_(signal::Constant{}) {}
    InputSignal(signal::Constant c) : v_(std::move(c)) {}
    InputSignal(signal::Sinusoid s) : v_(std::move(s)) {}
    InputSignal(signal::Piecewise p) : v_(validated(std::move(p))) {}
    InputSignal(signal::Sum s) : v_(std::move(s)) {}

    static InputSignal constant(const Vec3& v) { return signal::Constant{v}; }
    static InputSignal sinusoid(const Vec3& amplitude, double frequency_hz, double phase = 0.0)
    {
        return signal::Sinusoid{amplitude, frequency_hz, phase};
    }

    const Variant& variant() const { return v_; }

    Vec3 operator()(double t) const
    {
        return std::visit([t](const auto& s) { return evaluate(s, t); }, v_);
    }

    /// Closed-form integral of u over [0, t].
    Vec3 integral(double t) const
    {
        return std::visit([t](const auto& s) { return integrate(s, t); }, v_);
    }

    /// Discontinuities strictly inside (t0, t1), ascending, possibly repeated.
    void breakpoints(double t0, double t1, std::vector<double>& out) const
    {
        std::visit([&](const auto& s) { collect(s, t0, t1, out); }, v_);
    }

private:
    static signal::Piecewise validated(signal::Piecewise p)
    {
        if (p.values.size() != p.switch_times.size() + 1) {
            throw std::invalid_argument("piecewise input: need one more value than switch times");
        }
        for (std::size_t i = 0; i < p.switch_times.size(); ++i) {
            if (!(p.switch_times[i] > 0.0) || (i > 0 && !(p.switch_times[i] > p.switch_times[i - 1]))) {
                throw std::invalid_argument("piecewise input: switch times must be positive and increasing");
            }
        }
        return p;
    }

    static Vec3 evaluate(const signal::Constant& c, double) { return c.value; }
    static Vec3 evaluate(const signal::Sinusoid& s, double t)
    {
        return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency_hz * t + s.phase);
    }
    static Vec3 evaluate(const signal::Piecewise& p, double t)
    {
        std::size_t i = 0;
        while (i < p.switch_times.size() && t >= p.switch_times[i]) {
            ++i;
        }
        return p.values[i];
    }
    static Vec3 evaluate(const signal::Sum& s, double t)
    {
        Vec3 acc = Vec3::Zero();
        for (const auto& term : s.terms) {
            acc += term(t);
        }
        return acc;
    }

    static Vec3 integrate(const signal::Constant& c, double t) { return c.value * t; }
    static Vec3 integrate(const signal::Sinusoid& s, double t)
    {
        const double w = 2.0 * std::numbers::pi * s.frequency_hz;
        if (w == 0.0) {
            return s.amplitude * std::sin(s.phase) * t;
        }
        return s.amplitude * (std::cos(s.phase) - std::cos(w * t + s.phase)) / w;
    }
    static Vec3 integrate(const signal::Piecewise& p, double t)
    {
        Vec3 acc = Vec3::Zero();
        double start = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            const double end = i < p.switch_times.size() ? p.switch_times[i] : t;
            if (t <= start) {
                break;
            }
            acc += p.values[i] * (std::min(end, t) - start);
            start = end;
        }
        return acc;
    }
    static Vec3 integrate(const signal::Sum& s, double t)
    {
        Vec3 acc = Vec3::Zero();
        for (const auto& term : s.terms) {
            acc += term.integral(t);
        }
        return acc;
    }

    static void collect(const signal::Constant&, double, double, std::vector<double>&) {}
    static void collect(const signal::Sinusoid&, double, double, std::vector<double>&) {}
    static void collect(const signal::Piecewise& p, double t0, double t1, std::vector<double>& out)
    {
        for (double s : p.switch_times) {
            if (s > t0 && s < t1) {
                out.push_back(s);
            }
        }
    }
    static void collect(const signal::Sum& s, double t0, double t1, std::vector<double>& out)
    {
        for (const auto& term : s.terms) {
            term.breakpoints(t0, t1, out);
        }
    }

    Variant v_;
};

inline AlgebraElement eval_input(const InputSignal& signal, double t)
{
    if (!(t >= 0.0)) {
        throw std::invalid_argument("eval_input: time must be non-negative");
    }
    return AlgebraElement(signal(t));
}

struct PlantState {
    GroupElement x;
    double t = 0.0;
};

/// X' = X u, as a tangent matrix at X.
inline Mat3 plant_vector_field(const GroupElement& x, const AlgebraElement& u)
{
    return x.matrix() * u.matrix();
}

inline OutputPoint output(const GroupElement& x, const OutputPoint& y0) { return act(x, y0); }

/// Projected kinematics y' = -u x y. Independent of the representative X
/// of y; zero exactly when u is parallel to y.
inline TangentVector project_dynamics(const OutputPoint& y, const AlgebraElement& u)
{
    return TangentVector(y, -u.vec().cross(y.dir()));
}

/// X and Y produce the same output for every input iff X Y^{-1} fixes y0.
inline bool indistinguishable(const GroupElement& x, const GroupElement& y, const OutputPoint& y0)
{
    return in_stabiliser(x * y.inverse(), y0);
}

}  // namespace hobs

#endif  // HOBS_SYSTEMS_HPP
