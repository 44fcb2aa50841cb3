// simulation.hpp
//
// Co-simulation of the plant and the observers, run summaries and seeded
// Monte Carlo sweeps over observer initial conditions.

#ifndef HOBS_SIMULATION_HPP
#define HOBS_SIMULATION_HPP

#include "hobs/circle.hpp"
#include "hobs/integrator.hpp"
#include "hobs/observer.hpp"
#include "hobs/random.hpp"
#include "hobs/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hobs {

inline constexpr double kMaxStep = 1e-2;           // s
inline constexpr double kRateWindowUpper = 0.1;    // rad
inline constexpr double kRateWindowFloor = 1e-9;   // rad, below this the angle is rounding noise
inline constexpr int kRateWindowMinSamples = 10;

struct TrajectorySample {
    double t = 0.0;
    GroupElement x;
    std::optional<GroupElement> xhat;
    OutputPoint y;
    OutputPoint yhat;
    double theta = 0.0;
    double drift = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
};

struct RunSummary {
    double initial_angle = 0.0;
    double final_angle = 0.0;
    std::optional<double> t_converged;
    std::optional<double> fitted_rate;
    double max_drift = 0.0;
    bool converged = false;
};

struct CoSimResult {
    TrajectoryRecord lifted;
    TrajectoryRecord projected;
    double max_consistency = 0.0;  // max |act(Xhat, y0) - yhat|
};

struct MonteCarloResult {
    std::vector<RunSummary> runs;
    double convergence_fraction = 0.0;
};

// ---------------------------------------------------------------------------
// Scenario resolution.

inline GroupElement plant_group(const Scenario& s)
{
    if (const auto* g = std::get_if<GroupElement>(&s.plant)) {
        return *g;
    }
    if (const auto* y = std::get_if<OutputPoint>(&s.plant)) {
        return section(*y, s.y0);
    }
    throw std::invalid_argument("plant initial state is not an SO(3)/S^2 value");
}

inline GroupElement observer_group(const Scenario& s)
{
    if (const auto* g = std::get_if<GroupElement>(&s.observer)) {
        return *g;
    }
    if (const auto* y = std::get_if<OutputPoint>(&s.observer)) {
        return section(*y, s.y0);
    }
    throw std::invalid_argument("observer initial state is not an SO(3)/S^2 value");
}

inline OutputPoint observer_output(const Scenario& s)
{
    if (const auto* y = std::get_if<OutputPoint>(&s.observer)) {
        return *y;
    }
    if (const auto* g = std::get_if<GroupElement>(&s.observer)) {
        return act(*g, s.y0);
    }
    throw std::invalid_argument("observer initial state is not an SO(3)/S^2 value");
}

inline long long step_count(const Scenario& s)
{
    const double h = s.integrator.step;
    if (!(h > 0.0) || !(h <= kMaxStep)) {
        throw std::invalid_argument("integrator step must lie in (0, 1e-2] s");
    }
    if (!(s.t_end > 0.0) || !std::isfinite(s.t_end)) {
        throw std::invalid_argument("t_end must be positive");
    }
    if (s.sample_every < 1) {
        throw std::invalid_argument("sample_every must be at least 1");
    }
    const long long n = std::llround(s.t_end / h);
    return std::max(n, 1LL);
}

namespace detail {

/// Observer velocity on S^2 for the selected innovation.
inline Vec3 output_observer_velocity(Innovation innovation, const CostFunction& c, const OutputPoint& yhat,
                                     const OutputPoint& y, const AlgebraElement& u)
{
    switch (innovation) {
    case Innovation::Gradient: return projected_observer_field(c, yhat, y, u).vec();
    case Innovation::None: return project_dynamics(yhat, u).vec();
    case Innovation::NonInvariant:
        return project_dynamics(yhat, u).vec() - c.gain() * anisotropic_cost().grad1(yhat, y).vec();
    }
    return Vec3::Zero();
}

/// Fixed-step driver: records t = 0, every `sample_every` steps and the end.
template <int NG, int NS, class Field, class Record>
void drive(const Scenario& s, Field& field, ProductState<NG, NS> x, Record&& record)
{
    const long long n = step_count(s);
    const double h = s.integrator.step;
    record(0.0, x);
    for (long long i = 1; i <= n; ++i) {
        try {
            x = integrate_step(s.integrator, field, s.input, static_cast<double>(i - 1) * h, h, x);
        } catch (const SimulationAborted&) {
            throw;
        } catch (const std::logic_error& e) {
            // The scenario was validated up front, so this is a state blow-up.
            throw SimulationAborted("simulation aborted at t = " + std::to_string(static_cast<double>(i) * h) +
                                    ": " + e.what());
        }
        if (i % s.sample_every == 0 || i == n) {
            record(static_cast<double>(i) * h, x);
        }
    }
}

}  // namespace detail

/// Plant on SO(3) with the gradient observer on S^2.
inline TrajectoryRecord simulate_projected(const Scenario& s)
{
    const CostFunction c(s.k);
    const OutputPoint y0 = s.y0;
    ProductState<1, 1> x0;
    x0.groups[0] = plant_group(s).matrix();
    x0.spheres[0] = observer_output(s).dir();

    auto field = [&](double t, const ProductState<1, 1>& x) {
        const AlgebraElement u(s.input(t));
        const OutputPoint y = act(GroupElement::unchecked(x.groups[0]), y0);
        const OutputPoint yhat = OutputPoint::normalize(x.spheres[0]);
        ProductState<1, 1> d;
        d.groups[0] = plant_vector_field(GroupElement::unchecked(x.groups[0]), u);
        d.spheres[0] = detail::output_observer_velocity(s.innovation, c, yhat, y, u);
        return d;
    };

    TrajectoryRecord rec;
    rec.samples.reserve(static_cast<std::size_t>(step_count(s) / s.sample_every + 2));
    detail::drive(s, field, x0, [&](double t, const ProductState<1, 1>& x) {
        TrajectorySample smp;
        smp.t = t;
        smp.x = GroupElement::unchecked(x.groups[0]);
        smp.y = output(smp.x, y0);
        smp.yhat = OutputPoint::normalize(x.spheres[0]);
        smp.theta = error_angle(smp.yhat, smp.y);
        smp.drift = smp.x.drift();
        rec.samples.push_back(smp);
    });
    return rec;
}

/// Plant and lifted observer (explicit complementary filter) on SO(3).
inline TrajectoryRecord simulate_lifted(const Scenario& s)
{
    const CostFunction c(s.k);
    const OutputPoint y0 = s.y0;
    ProductState<2, 0> x0;
    x0.groups[0] = plant_group(s).matrix();
    x0.groups[1] = observer_group(s).matrix();

    auto field = [&](double t, const ProductState<2, 0>& x) {
        const AlgebraElement u(s.input(t));
        const GroupElement plant = GroupElement::unchecked(x.groups[0]);
        const GroupElement xhat = GroupElement::unchecked(x.groups[1]);
        ProductState<2, 0> d;
        d.groups[0] = plant_vector_field(plant, u);
        d.groups[1] = xhat.matrix() * lifted_observer_field(c, xhat, output(plant, y0), u, y0).matrix();
        return d;
    };

    TrajectoryRecord rec;
    rec.samples.reserve(static_cast<std::size_t>(step_count(s) / s.sample_every + 2));
    detail::drive(s, field, x0, [&](double t, const ProductState<2, 0>& x) {
        TrajectorySample smp;
        smp.t = t;
        smp.x = GroupElement::unchecked(x.groups[0]);
        smp.xhat = GroupElement::unchecked(x.groups[1]);
        smp.y = output(smp.x, y0);
        smp.yhat = output(*smp.xhat, y0);
        smp.theta = error_angle(canonical_error_from_group(*smp.xhat, smp.x, y0), y0);
        smp.drift = smp.xhat->drift();
        rec.samples.push_back(smp);
    });
    return rec;
}

/// Integrates plant, lifted observer and projected observer in one state,
/// with yhat(0) = act(Xhat(0), y0).
inline CoSimResult co_simulate(const Scenario& s)
{
    const CostFunction c(s.k);
    const OutputPoint y0 = s.y0;
    ProductState<2, 1> x0;
    x0.groups[0] = plant_group(s).matrix();
    const GroupElement xhat0 = observer_group(s);
    x0.groups[1] = xhat0.matrix();
    x0.spheres[0] = act(xhat0, y0).dir();

    auto field = [&](double t, const ProductState<2, 1>& x) {
        const AlgebraElement u(s.input(t));
        const GroupElement plant = GroupElement::unchecked(x.groups[0]);
        const GroupElement xhat = GroupElement::unchecked(x.groups[1]);
        const OutputPoint y = output(plant, y0);
        ProductState<2, 1> d;
        d.groups[0] = plant_vector_field(plant, u);
        d.groups[1] = xhat.matrix() * lifted_observer_field(c, xhat, y, u, y0).matrix();
        d.spheres[0] = projected_observer_field(c, OutputPoint::normalize(x.spheres[0]), y, u).vec();
        return d;
    };

    CoSimResult res;
    detail::drive(s, field, x0, [&](double t, const ProductState<2, 1>& x) {
        TrajectorySample lifted;
        lifted.t = t;
        lifted.x = GroupElement::unchecked(x.groups[0]);
        lifted.xhat = GroupElement::unchecked(x.groups[1]);
        lifted.y = output(lifted.x, y0);
        lifted.yhat = output(*lifted.xhat, y0);
        lifted.theta = error_angle(canonical_error_from_group(*lifted.xhat, lifted.x, y0), y0);
        lifted.drift = lifted.xhat->drift();

        TrajectorySample projected = lifted;
        projected.yhat = OutputPoint::normalize(x.spheres[0]);
        projected.theta = error_angle(projected.yhat, projected.y);

        res.max_consistency = std::max(res.max_consistency, (lifted.yhat.dir() - projected.yhat.dir()).norm());
        res.lifted.samples.push_back(lifted);
        res.projected.samples.push_back(projected);
    });
    return res;
}

/// Final angle, first convergence time, fitted exponential rate on the
/// small-angle window and maximal drift.
inline RunSummary summarize(const TrajectoryRecord& rec, double threshold)
{
    RunSummary out;
    if (rec.samples.empty()) {
        return out;
    }
    out.initial_angle = rec.samples.front().theta;
    out.final_angle = rec.samples.back().theta;
    out.converged = out.final_angle < threshold;

    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    int n = 0;
    for (const auto& smp : rec.samples) {
        out.max_drift = std::max(out.max_drift, smp.drift);
        if (!out.t_converged && smp.theta < threshold) {
            out.t_converged = smp.t;
        }
        if (smp.theta < kRateWindowUpper && smp.theta >= kRateWindowFloor) {
            const double l = std::log(smp.theta);
            st += smp.t;
            sl += l;
            stt += smp.t * smp.t;
            stl += smp.t * l;
            ++n;
        }
    }
    if (n >= kRateWindowMinSamples) {
        const double denom = n * stt - st * st;
        if (denom > 0.0) {
            out.fitted_rate = -(n * stl - st * sl) / denom;
        }
    }
    return out;
}

/// max_t |theta(t) - theta(0)|.
inline double check_synchrony(const TrajectoryRecord& rec)
{
    double worst = 0.0;
    if (rec.samples.empty()) {
        return worst;
    }
    const double theta0 = rec.samples.front().theta;
    for (const auto& smp : rec.samples) {
        worst = std::max(worst, std::abs(smp.theta - theta0));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Monte Carlo.

/// Draws the observer initial state for one sweep run: uniform on S^2
/// (projected) or Haar on SO(3) (lifted), rejecting outputs within
/// `exclusion` rad of the antipode of the plant output.
inline InitialState sample_observer_init(const Scenario& base, Rng& rng)
{
    const OutputPoint y_init = output(plant_group(base), base.y0);
    const OutputPoint anti = y_init.antipode();
    const double exclusion = base.monte_carlo.antipodal_exclusion;
    for (;;) {
        if (base.monte_carlo.model == SweepModel::Lifted) {
            const GroupElement g = random_rotation(rng);
            if (error_angle(act(g, base.y0), anti) >= exclusion) {
                return g;
            }
        } else {
            const OutputPoint y = random_output(rng);
            if (error_angle(y, anti) >= exclusion) {
                return y;
            }
        }
    }
}

/// Seeded sweep over observer initial conditions. Run i draws from its own
/// stream derive_seed(seed, i), so results do not depend on the number of
/// worker threads; they are stored by run index.
inline MonteCarloResult monte_carlo(const Scenario& base, int n_runs, std::uint64_t seed)
{
    if (n_runs < 1) {
        throw std::invalid_argument("monte_carlo: n_runs must be at least 1");
    }
    if (base.instance != Instance::So3S2) {
        throw std::invalid_argument("monte_carlo: only the so3-s2 instance is supported");
    }
    step_count(base);

    MonteCarloResult res;
    res.runs.resize(static_cast<std::size_t>(n_runs));

    auto one = [&](int i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Scenario s = base;
        s.observer = sample_observer_init(base, rng);
        const TrajectoryRecord rec =
            base.monte_carlo.model == SweepModel::Lifted ? simulate_lifted(s) : simulate_projected(s);
        res.runs[static_cast<std::size_t>(i)] = summarize(rec, base.threshold);
    };

    const int threads = std::max(1, std::min(base.monte_carlo.threads, n_runs));
    if (threads == 1) {
        for (int i = 0; i < n_runs; ++i) {
            one(i);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (int i = next++; i < n_runs; i = next++) {
                            one(i);
                        }
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    int converged = 0;
    for (const auto& r : res.runs) {
        converged += r.converged ? 1 : 0;
    }
    res.convergence_fraction = static_cast<double>(converged) / n_runs;
    return res;
}

// ---------------------------------------------------------------------------
// SO(2) / S^1.

struct CircleSample {
    double t = 0.0;
    double phi = 0.0;     // plant
    double y = 0.0;       // plant output
    double yhat = 0.0;    // projected observer
    double phihat = 0.0;  // lifted observer
    double theta = 0.0;   // |yhat - y|
};

struct CircleRecord {
    std::vector<CircleSample> samples;
};

struct CircleOracleReport {
    double max_deviation = 0.0;       // observers vs closed form
    double final_state_error = 0.0;   // |phihat - phi| at t_end
    CircleRecord record;
};

inline double circle_plant_init(const Scenario& s)
{
    if (const auto* g = std::get_if<circle::GroupAngle>(&s.plant)) {
        return g->value;
    }
    if (const auto* y = std::get_if<circle::OutputAngle>(&s.plant)) {
        return circle::wrap(s.y0_angle - y->value);
    }
    throw std::invalid_argument("plant initial state is not an SO(2)/S^1 value");
}

inline double circle_observer_output_init(const Scenario& s)
{
    if (const auto* y = std::get_if<circle::OutputAngle>(&s.observer)) {
        return circle::wrap(y->value);
    }
    if (const auto* g = std::get_if<circle::GroupAngle>(&s.observer)) {
        return circle::act(*g, {s.y0_angle}).value;
    }
    throw std::invalid_argument("observer initial state is not an SO(2)/S^1 value");
}

/// Plant, projected observer and lifted observer on the circle. The body
/// rate is the z component of the scenario input.
inline CircleRecord simulate_circle(const Scenario& s)
{
    const long long n = step_count(s);
    const double h = s.integrator.step;
    const double k = s.k;
    using State = std::array<double, 3>;  // phi, yhat, phihat

    auto field = [&](double t, const State& x) -> State {
        const double omega = s.input(t).z();
        const circle::OutputAngle y{s.y0_angle - x[0]};
        const circle::OutputAngle yhat_lifted{s.y0_angle - x[2]};
        return {omega, circle::projected_observer_field(k, {x[1]}, y, omega),
                circle::lifted_observer_field(k, yhat_lifted, y, omega)};
    };
    auto axpy = [](const State& a, double c, const State& d) {
        return State{a[0] + c * d[0], a[1] + c * d[1], a[2] + c * d[2]};
    };
    auto substep = [&](double t, double t1, const State& x) -> State {
        const double dt = t1 - t;
        if (s.integrator.method == IntegratorMethod::LieEuler) {
            return axpy(x, dt, field(t, x));
        }
        const State k1 = field(t, x);
        const State k2 = field(t + 0.5 * dt, axpy(x, 0.5 * dt, k1));
        const State k3 = field(t + 0.5 * dt, axpy(x, 0.5 * dt, k2));
        const State k4 = field(std::nextafter(t1, t), axpy(x, dt, k3));  // left limit at t1
        State r;
        for (int i = 0; i < 3; ++i) {
            r[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        return r;
    };

    const double phi0 = circle_plant_init(s);
    const double yhat0 = circle_observer_output_init(s);
    State x{phi0, yhat0, circle::wrap(s.y0_angle - yhat0)};

    CircleRecord rec;
    auto record = [&](double t) {
        CircleSample smp;
        smp.t = t;
        smp.phi = circle::wrap(x[0]);
        smp.y = circle::wrap(s.y0_angle - x[0]);
        smp.yhat = circle::wrap(x[1]);
        smp.phihat = circle::wrap(x[2]);
        smp.theta = std::abs(circle::wrap(smp.yhat - smp.y));
        rec.samples.push_back(smp);
    };
    record(0.0);
    std::vector<double> cuts;
    for (long long i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i - 1) * h;
        cuts.clear();
        s.input.breakpoints(t, t + h, cuts);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(t + h);
        double now = t;
        for (double next : cuts) {
            if (next > now) {
                x = substep(now, next, x);
                now = next;
            }
        }
        for (double& v : x) {
            v = circle::wrap(v);
        }
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
            throw SimulationAborted("non-finite circle state at t = " + std::to_string(t + h));
        }
        if (i % s.sample_every == 0 || i == n) {
            record(static_cast<double>(i) * h);
        }
    }
    return rec;
}

/// Compares the simulated circle observers with the closed-form solution
/// y(t) = y(0) - int u, yhat(t) = y(t) + delta(t), phihat = phi - delta,
/// where tan(delta/2) = tan(delta0/2) exp(-k t).
inline CircleOracleReport so2_oracle_run(const Scenario& s)
{
    CircleOracleReport rep;
    rep.record = simulate_circle(s);
    const auto& first = rep.record.samples.front();
    const double delta0 = circle::wrap(first.yhat - first.y);
    const double omega0 = s.input.integral(0.0).z();
    for (const auto& smp : rep.record.samples) {
        const double turned = s.input.integral(smp.t).z() - omega0;
        const double phi_ref = first.phi + turned;
        const double y_ref = first.y - turned;
        const double delta = circle::error_closed_form(delta0, s.k, smp.t);
        const double dev = std::max({std::abs(circle::wrap(smp.phi - phi_ref)),
                                     std::abs(circle::wrap(smp.yhat - (y_ref + delta))),
                                     std::abs(circle::wrap(smp.phihat - (phi_ref - delta)))});
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    const auto& last = rep.record.samples.back();
    rep.final_state_error = std::abs(circle::wrap(last.phihat - last.phi));
    return rep;
}

}  // namespace hobs

#endif  // HOBS_SIMULATION_HPP
