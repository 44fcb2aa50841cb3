#include "hobs/runner.hpp"
#include "hobs/simulation.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hobs;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario base(double k = 1.0)
{
    Scenario s = default_scenario(Instance::So3S2);
    s.k = k;
    s.sample_every = 10;
    return s;
}

std::vector<double> times_of(const TrajectoryRecord& r)
{
    std::vector<double> t;
    for (const auto& s : r.samples) t.push_back(s.t);
    return t;
}

double max_closed_form_gap(const TrajectoryRecord& rec, double k)
{
    const double theta0 = rec.samples.front().theta;
    double worst = 0.0;
    for (const auto& s : rec.samples) {
        worst = std::max(worst, std::abs(s.theta - oracle::angle_law(theta0, k, s.t)));
    }
    return worst;
}

InputSignal busy_input()
{
    return signal::Sum{{InputSignal::sinusoid(Vec3(0.8, -0.4, 0.6), 0.35, 0.2),
                        signal::Piecewise{{1.5, 4.0, 7.25}, {Vec3(0, 0.5, 0), Vec3(-0.7, 0, 0.2), Vec3(0, 0, -1),
                                                             Vec3(0.3, 0.3, 0.3)}}}};
}

}  // namespace

TEST(StepCount, ValidatesStepAndHorizon)
{
    Scenario s = base();
    s.integrator.step = 0.0;
    EXPECT_THROW(simulate_projected(s), std::invalid_argument);
    s.integrator.step = 2e-2;
    EXPECT_THROW(simulate_projected(s), std::invalid_argument);
    s.integrator.step = 1e-2;
    s.t_end = 0.0;
    EXPECT_THROW(simulate_projected(s), std::invalid_argument);
    s.t_end = 1.0;
    s.sample_every = 0;
    EXPECT_THROW(simulate_projected(s), std::invalid_argument);
    s.sample_every = 7;
    const auto rec = simulate_projected(s);
    // t = 0, every 7th of 100 steps, and the final step.
    EXPECT_EQ(rec.samples.size(), 1u + 14u + 1u);
    EXPECT_DOUBLE_EQ(rec.samples.back().t, 1.0);
}

TEST(SimulateProjected, MatchesAdaptiveOracleUnderBusyInput)
{
    Scenario s = base(1.5);
    s.input = busy_input();
    s.observer = OutputPoint::normalize(Vec3(-0.3, 0.9, -0.2));
    const auto rec = simulate_projected(s);
    const auto ref = oracle::s2_observer_angles(Vec3::UnitZ(), std::get<OutputPoint>(s.observer).dir(),
                                                [&](double t) { return s.input(t); }, s.k, times_of(rec),
                                                {1.5, 4.0, 7.25});
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, std::abs(rec.samples[i].theta - ref[i]));
    }
    EXPECT_LE(worst, 1e-9);
    EXPECT_LE(max_closed_form_gap(rec, s.k), 1e-9);
}

TEST(SimulateProjected, PlantStaysOnGroup)
{
    Scenario s = base();
    s.input = busy_input();
    const auto rec = simulate_projected(s);
    for (const auto& smp : rec.samples) {
        ASSERT_LE(smp.drift, 1e-9);
        ASSERT_NEAR(smp.yhat.dir().norm(), 1.0, 1e-12);
    }
}

TEST(SimulateLifted, MatchesClosedFormAndConvergesOnGroup)
{
    Scenario s = base(2.0);
    s.input = busy_input();
    s.observer = rot_x(2.0) * rot_z(-0.9);
    const auto rec = simulate_lifted(s);
    EXPECT_LE(max_closed_form_gap(rec, s.k), 1e-8);
    const auto& last = rec.samples.back();
    ASSERT_TRUE(last.xhat.has_value());
    // Group-level error has converged into the stabiliser: outputs agree.
    EXPECT_TRUE(indistinguishable(*last.xhat, last.x, s.y0) ||
                error_angle(canonical_error_from_group(*last.xhat, last.x, s.y0), s.y0) < 1e-7);
    EXPECT_LE(summarize(rec, 1e-3).max_drift, 1e-9);
}

TEST(CoSimulate, LiftedProjectsOntoProjected)
{
    Scenario s = base(1.0);
    s.input = busy_input();
    s.observer = rot_y(2.8) * rot_x(0.4);
    const CoSimResult r = co_simulate(s);
    EXPECT_LE(r.max_consistency, 1e-6);
    EXPECT_EQ(r.lifted.samples.size(), r.projected.samples.size());
}

TEST(Antipode, ExactAntipodeIsStationary)
{
    for (const InputSignal& u : {InputSignal(), busy_input()}) {
        Scenario s = base();
        s.input = u;
        s.observer = s.y0.antipode();  // plant starts at identity, y(0) = y0
        const auto rec = simulate_projected(s);
        double worst = 0.0;
        for (const auto& smp : rec.samples) worst = std::max(worst, std::abs(smp.theta - kPi));
        EXPECT_LE(worst, 1e-9);
    }
}

TEST(Antipode, SmallPerturbationEscapesAndConverges)
{
    Scenario s = base(2.0);
    s.t_end = 15.0;
    const Vec3 anti = -s.y0.dir();
    s.observer = OutputPoint::normalize(anti + 1e-6 * Vec3::UnitX());
    const auto rec = simulate_projected(s);
    EXPECT_GT(rec.samples.front().theta, kPi - 2e-6);
    EXPECT_LT(rec.samples.back().theta, 1e-3);
}

TEST(Summarize, FitsKnownRate)
{
    TrajectoryRecord rec;
    for (int i = 0; i <= 100; ++i) {
        TrajectorySample smp;
        smp.t = 0.1 * i;
        smp.theta = 0.05 * std::exp(-2.0 * smp.t);
        smp.drift = 1e-14 * i;
        rec.samples.push_back(smp);
    }
    const RunSummary r = summarize(rec, 1e-3);
    ASSERT_TRUE(r.fitted_rate.has_value());
    EXPECT_NEAR(*r.fitted_rate, 2.0, 1e-9);
    ASSERT_TRUE(r.t_converged.has_value());
    EXPECT_NEAR(*r.t_converged, 2.0, 1e-12);  // first sample with 0.05 e^{-2t} < 1e-3
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.max_drift, 1e-12);
}

TEST(Summarize, NeedsTenWindowSamples)
{
    TrajectoryRecord rec;
    for (int i = 0; i < 9; ++i) {
        TrajectorySample smp;
        smp.t = i;
        smp.theta = 0.05 * std::exp(-1.0 * i);
        rec.samples.push_back(smp);
    }
    EXPECT_FALSE(summarize(rec, 1e-3).fitted_rate.has_value());
    const RunSummary empty = summarize(TrajectoryRecord{}, 1e-3);
    EXPECT_FALSE(empty.converged);
}

TEST(Summarize, SimulatedRateMatchesGain)
{
    for (double k : {0.5, 1.0, 2.0}) {
        Scenario s = base(k);
        s.t_end = 20.0 / k;
        s.input = InputSignal::sinusoid(Vec3(0.2, 0.5, -0.3), 0.2);
        const RunSummary r = summarize(simulate_projected(s), 1e-3);
        ASSERT_TRUE(r.fitted_rate.has_value());
        EXPECT_NEAR(*r.fitted_rate / k, 1.0, 0.02) << "k=" << k;
    }
}

TEST(Sweeps, AutonomyAcrossInputs)
{
    Rng rng(41);
    std::vector<TrajectoryRecord> runs;
    for (int i = 0; i < 5; ++i) {
        Scenario s = base();
        s.input = InputSignal::sinusoid(gaussian_vec3(rng), 0.1 + 0.2 * i, 0.3 * i);
        s.observer = OutputPoint::normalize(Vec3(0.2, -1.0, 0.4));
        runs.push_back(simulate_projected(s));
    }
    double spread = 0.0;
    for (std::size_t j = 0; j < runs[0].samples.size(); ++j) {
        for (const auto& r : runs) spread = std::max(spread, std::abs(r.samples[j].theta - runs[0].samples[j].theta));
    }
    EXPECT_LE(spread, 1e-6);
}

TEST(Sweeps, NonInvariantInnovationBreaksAutonomy)
{
    std::vector<double> finals;
    for (double a : {0.0, 1.5}) {
        Scenario s = base();
        s.innovation = Innovation::NonInvariant;
        s.input = InputSignal::sinusoid(Vec3(a, -a, 0.5 * a), 0.3);
        s.observer = OutputPoint::normalize(Vec3(0.2, -1.0, 0.4));
        s.t_end = 3.0;
        finals.push_back(simulate_projected(s).samples[150].theta);
    }
    EXPECT_GE(std::abs(finals[0] - finals[1]), 1e-3);
}

TEST(Integrator, OrderOfAccuracy)
{
    auto gap = [](double h, IntegratorMethod m) {
        Scenario s = base(2.0);
        s.integrator = {m, h};
        s.sample_every = 1;
        s.observer = OutputPoint::normalize(Vec3(-1, 0.2, 0.3));
        return max_closed_form_gap(simulate_projected(s), s.k);
    };
    const double rk = gap(1e-2, IntegratorMethod::Rk4Project) / gap(5e-3, IntegratorMethod::Rk4Project);
    EXPECT_GE(rk, 12.0);
    EXPECT_LE(rk, 20.0);
    const double le = gap(1e-2, IntegratorMethod::LieEuler) / gap(5e-3, IntegratorMethod::LieEuler);
    EXPECT_NEAR(le, 2.0, 0.2);
}

TEST(Integrator, LieEulerKeepsObserverOnGroup)
{
    Scenario s = base();
    s.integrator = {IntegratorMethod::LieEuler, 1e-3};
    s.t_end = 100.0;  // 1e5 steps
    s.sample_every = 1;
    s.input = InputSignal::sinusoid(Vec3(1.0, -0.5, 0.7), 0.4);
    s.observer = rot_x(1.0);
    const auto rec = simulate_lifted(s);
    EXPECT_EQ(rec.samples.size(), 100001u);
    EXPECT_LE(summarize(rec, 1e-3).max_drift, 1e-9);
}

TEST(Integrator, AbortsOnNonFiniteState)
{
    Scenario s = base();
    s.input = InputSignal::constant(Vec3(std::nan(""), 0, 0));
    EXPECT_THROW(simulate_projected(s), SimulationAborted);
    EXPECT_THROW(simulate_lifted(s), SimulationAborted);
}

TEST(MonteCarlo, RepeatableAndThreadIndependent)
{
    Scenario s = base();
    s.t_end = 12.0;
    s.integrator.step = 1e-2;
    s.input = InputSignal::sinusoid(Vec3(0.4, -0.3, 0.2), 0.1);
    const MonteCarloResult a = monte_carlo(s, 24, 99);
    const MonteCarloResult b = monte_carlo(s, 24, 99);
    s.monte_carlo.threads = 3;
    const MonteCarloResult c = monte_carlo(s, 24, 99);
    ASSERT_EQ(a.runs.size(), 24u);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_EQ(a.runs[i].initial_angle, b.runs[i].initial_angle);
        EXPECT_EQ(a.runs[i].final_angle, b.runs[i].final_angle);
        EXPECT_EQ(a.runs[i].final_angle, c.runs[i].final_angle);
        EXPECT_GE(a.runs[i].initial_angle, 0.0);
        EXPECT_LE(a.runs[i].initial_angle, kPi - 0.01);
    }
    EXPECT_EQ(a.convergence_fraction, 1.0);
    const MonteCarloResult d = monte_carlo(s, 24, 100);
    EXPECT_NE(a.runs[0].initial_angle, d.runs[0].initial_angle);
}

TEST(MonteCarlo, LiftedModelAndErrors)
{
    Scenario s = base();
    s.t_end = 15.0;
    s.integrator.step = 1e-2;
    s.monte_carlo.model = SweepModel::Lifted;
    const MonteCarloResult r = monte_carlo(s, 10, 3);
    EXPECT_EQ(r.convergence_fraction, 1.0);
    EXPECT_THROW(monte_carlo(s, 0, 3), std::invalid_argument);
    Scenario c = default_scenario(Instance::So2S1);
    EXPECT_THROW(monte_carlo(c, 5, 3), std::invalid_argument);
}

TEST(MonteCarlo, ExclusionCapIsRespected)
{
    Scenario s = base();
    s.monte_carlo.antipodal_exclusion = 0.5;
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const OutputPoint y = std::get<OutputPoint>(sample_observer_init(s, rng));
        ASSERT_GE(error_angle(y, s.y0.antipode()), 0.5);
    }
}

TEST(Circle, ClosedFormAndAdaptiveOracle)
{
    Scenario s = default_scenario(Instance::So2S1);
    s.k = 1.3;
    s.y0_angle = 0.4;
    s.input = signal::Sum{{InputSignal::sinusoid(Vec3(0, 0, 0.9), 0.3),
                           signal::Piecewise{{2.0, 6.5}, {Vec3(0, 0, 0.5), Vec3(0, 0, -1.0), Vec3(0, 0, 0.25)}}}};
    s.plant = circle::GroupAngle{0.7};
    s.observer = circle::OutputAngle{-2.6};
    const CircleOracleReport rep = so2_oracle_run(s);
    EXPECT_LE(rep.max_deviation, 1e-8);
    EXPECT_LE(rep.final_state_error, 1e-4);

    std::vector<double> times;
    for (const auto& smp : rep.record.samples) times.push_back(smp.t);
    const auto ref = oracle::circle_observer(0.7, -2.6, 0.4, s.k, [&](double t) { return s.input(t).z(); }, times,
                                             {2.0, 6.5});
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, std::abs(oracle::wrap(rep.record.samples[i].yhat - ref[i].yhat)));
        worst = std::max(worst, std::abs(oracle::wrap(rep.record.samples[i].phi - ref[i].phi)));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Circle, PrimitivesAndErrors)
{
    EXPECT_NEAR(circle::wrap(3 * kPi), kPi, 1e-15);
    EXPECT_NEAR(circle::wrap(-kPi), kPi, 1e-15);
    EXPECT_NEAR(circle::act({0.5}, {1.0}).value, 0.5, 1e-15);
    EXPECT_TRUE(circle::in_stabiliser({0.0}, {0.3}));
    EXPECT_FALSE(circle::in_stabiliser({0.1}, {0.3}));
    EXPECT_EQ(circle::project_dynamics(0.7), -0.7);
    EXPECT_NEAR(circle::cost(2.0, {0.0}, {kPi}), 4.0, 1e-15);
    EXPECT_NEAR(circle::grad1_cost(1.0, {kPi / 2}, {0.0}), 1.0, 1e-15);
    EXPECT_THROW(circle::error_closed_form(kPi, 1.0, 1.0), std::domain_error);
    EXPECT_NEAR(circle::error_closed_form(-1.0, 1.0, 1.0), -oracle::angle_law(1.0, 1.0, 1.0), 1e-15);
}

TEST(Circle, AntipodeStationaryAndLieEulerConverges)
{
    Scenario s = default_scenario(Instance::So2S1);
    s.observer = circle::OutputAngle{kPi};
    const CircleRecord rec = simulate_circle(s);
    for (const auto& smp : rec.samples) ASSERT_NEAR(smp.theta, kPi, 1e-9);

    s.observer = circle::OutputAngle{2.0};
    s.integrator = {IntegratorMethod::LieEuler, 1e-3};
    s.t_end = 20.0;
    EXPECT_LT(simulate_circle(s).samples.back().theta, 1e-6);
}
