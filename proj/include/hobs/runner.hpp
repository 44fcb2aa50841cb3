// runner.hpp
//
// Batch driver behind the command line tool: canned scenarios, mode
// dispatch and the on-disk artifacts (trajectory.csv, runs.csv,
// summary.json, residuals.json).

#ifndef HOBS_RUNNER_HPP
#define HOBS_RUNNER_HPP

#include "hobs/scenario.hpp"
#include "hobs/scenario_io.hpp"
#include "hobs/simulation.hpp"
#include "hobs/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hobs {

enum ExitCode : int { kExitSuccess = 0, kExitPropertyFailure = 1, kExitInputError = 2, kExitRuntimeAbort = 3 };

// ---------------------------------------------------------------------------
// Presets.

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"metni-s2", "explicit-complementary", "autonomy-demo",
                                                "almost-global-sweep"};
    return names;
}

class UnknownPreset : public std::invalid_argument {
public:
    explicit UnknownPreset(const std::string& name)
        : std::invalid_argument("unknown preset '" + name + "'; available: " + list())
    {
    }

private:
    static std::string list()
    {
        std::string s;
        for (const auto& n : preset_names()) {
            s += (s.empty() ? "" : ", ") + n;
        }
        return s;
    }
};

inline Scenario preset(const std::string& name)
{
    Scenario s = default_scenario(Instance::So3S2);
    if (name == "metni-s2") {
        // Output-space observer with a slowly varying body rate.
        s.mode = Mode::Projected;
        s.input = InputSignal::sinusoid(Vec3(0.3, -0.2, 0.5), 0.2);
        s.observer = OutputPoint::e1();
        s.t_end = 10.0;
        return s;
    }
    if (name == "explicit-complementary") {
        s.mode = Mode::Lifted;
        s.input = InputSignal::sinusoid(Vec3(0.5, 0.3, -0.4), 0.25);
        s.observer = rot_x(2.0) * rot_z(0.7);
        s.t_end = 10.0;
        return s;
    }
    if (name == "autonomy-demo") {
        s.mode = Mode::Projected;
        s.input = signal::Sum{{InputSignal::sinusoid(Vec3(1.0, 0.0, 0.5), 0.5),
                               signal::Piecewise{{2.5, 5.0, 7.5},
                                                 {Vec3(0.0, 0.8, 0.0), Vec3(-0.6, 0.0, 0.3), Vec3(0.0, 0.0, -1.0),
                                                  Vec3(0.4, 0.4, 0.4)}}}};
        s.observer = OutputPoint::normalize(Vec3(0.0, 1.0, -0.5));
        s.t_end = 10.0;
        return s;
    }
    if (name == "almost-global-sweep") {
        s.mode = Mode::MonteCarlo;
        s.input = InputSignal::sinusoid(Vec3(0.4, -0.3, 0.2), 0.1);
        s.t_end = 15.0;
        s.integrator.step = 5e-3;
        s.sample_every = 2;
        s.seed = 20090301;
        s.monte_carlo.runs = 1000;
        s.monte_carlo.model = SweepModel::Projected;
        return s;
    }
    throw UnknownPreset(name);
}

// ---------------------------------------------------------------------------
// Serialization helpers.

/// Seventeen significant digits, enough to round-trip every double.
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json to_json(const RunSummary& r)
{
    json j;
    j["initial_angle"] = r.initial_angle;
    j["final_angle"] = r.final_angle;
    j["t_converged"] = r.t_converged ? json(*r.t_converged) : json(nullptr);
    j["fitted_rate"] = r.fitted_rate ? json(*r.fitted_rate) : json(nullptr);
    j["max_drift"] = r.max_drift;
    j["converged"] = r.converged;
    return j;
}

inline json to_json(const PropertyResult& p)
{
    return {{"name", p.name},
            {"max_residual", p.value},
            {"tolerance", p.tolerance},
            {"bound", p.bound == PropertyResult::Bound::AtMost ? "at_most" : "at_least"},
            {"pass", p.pass}};
}

inline void write_text(const std::filesystem::path& file, const std::string& text)
{
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    }
    os << text;
    if (!os) {
        throw std::runtime_error("failed writing " + file.string());
    }
}

inline void write_residuals(const std::filesystem::path& out_dir, const std::vector<PropertyResult>& props)
{
    json a = json::array();
    for (const auto& p : props) {
        a.push_back(to_json(p));
    }
    write_text(out_dir / "residuals.json", a.dump(2) + "\n");
}

inline const char* kTrajectoryHeader = "t,y_x,y_y,y_z,yhat_x,yhat_y,yhat_z,theta,drift\n";

inline std::string trajectory_csv(const TrajectoryRecord& rec)
{
    std::string out = kTrajectoryHeader;
    for (const auto& s : rec.samples) {
        const double row[] = {s.t,          s.y.dir().x(),    s.y.dir().y(),    s.y.dir().z(), s.yhat.dir().x(),
                              s.yhat.dir().y(), s.yhat.dir().z(), s.theta,          s.drift};
        for (std::size_t i = 0; i < std::size(row); ++i) {
            out += (i ? "," : "") + format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

/// S^1 outputs are written embedded in the plane z = 0.
inline std::string trajectory_csv(const CircleRecord& rec)
{
    std::string out = kTrajectoryHeader;
    for (const auto& s : rec.samples) {
        const double row[] = {s.t,   std::cos(s.y), std::sin(s.y), 0.0, std::cos(s.yhat), std::sin(s.yhat),
                              0.0, s.theta,       0.0};
        for (std::size_t i = 0; i < std::size(row); ++i) {
            out += (i ? "," : "") + format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string runs_csv(const MonteCarloResult& mc)
{
    std::string out = "run,initial_angle,final_angle,t_converged,fitted_rate,max_drift,converged\n";
    for (std::size_t i = 0; i < mc.runs.size(); ++i) {
        const auto& r = mc.runs[i];
        out += std::to_string(i) + "," + format_double(r.initial_angle) + "," + format_double(r.final_angle) + "," +
               (r.t_converged ? format_double(*r.t_converged) : "") + "," +
               (r.fitted_rate ? format_double(*r.fitted_rate) : "") + "," + format_double(r.max_drift) + "," +
               (r.converged ? "1" : "0") + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mode dispatch.

struct RunOutcome {
    int exit_code = kExitSuccess;
    std::vector<PropertyResult> properties;
    json summary;
};

/// Max |theta(t) - closed form| for the gradient observer, when theta(0) < pi.
inline std::optional<double> closed_form_deviation(const TrajectoryRecord& rec, double k)
{
    if (rec.samples.empty() || rec.samples.front().theta >= std::numbers::pi - 1e-9) {
        return std::nullopt;
    }
    const double theta0 = rec.samples.front().theta;
    double worst = 0.0;
    for (const auto& s : rec.samples) {
        worst = std::max(worst, std::abs(s.theta - error_angle_closed_form(theta0, k, s.t)));
    }
    return worst;
}

/// Runs the scenario and writes its artifacts into out_dir. Exceptions from
/// invalid input (std::invalid_argument, DegenerateInput) and from aborted
/// simulations propagate to the caller.
inline RunOutcome run(const Scenario& scn, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    RunOutcome out;
    json summary;
    summary["code_version"] = kCodeVersion;
    summary["schema_version"] = kSchemaVersion;
    summary["mode"] = to_string(scn.mode);
    summary["scenario"] = scenario_to_json(scn);

    auto write_record = [&](const auto& rec) { write_text(out_dir / "trajectory.csv", trajectory_csv(rec)); };

    if (scn.instance == Instance::So2S1) {
        if (scn.mode == Mode::Verify) {
            out.properties = run_verification(scn.k, scn.verify_samples, scn.seed);
            write_residuals(out_dir, out.properties);
        } else {
            const CircleOracleReport rep = so2_oracle_run(scn);
            write_record(rep.record);
            summary["summary"] = {{"initial_angle", rep.record.samples.front().theta},
                                  {"final_angle", rep.record.samples.back().theta},
                                  {"final_state_error", rep.final_state_error}};
            out.properties.push_back(PropertyResult::at_most("circle_oracle_deviation", rep.max_deviation, 1e-8));
        }
    } else {
        switch (scn.mode) {
        case Mode::Projected: {
            const TrajectoryRecord rec = simulate_projected(scn);
            write_record(rec);
            summary["summary"] = to_json(summarize(rec, scn.threshold));
            if (scn.innovation == Innovation::Gradient) {
                if (auto dev = closed_form_deviation(rec, scn.k)) {
                    out.properties.push_back(PropertyResult::at_most("closed_form_angle", *dev, 1e-5));
                }
            }
            break;
        }
        case Mode::Lifted: {
            const TrajectoryRecord rec = simulate_lifted(scn);
            write_record(rec);
            summary["summary"] = to_json(summarize(rec, scn.threshold));
            if (auto dev = closed_form_deviation(rec, scn.k)) {
                out.properties.push_back(PropertyResult::at_most("closed_form_angle", *dev, 1e-5));
            }
            break;
        }
        case Mode::CoSim: {
            const CoSimResult res = co_simulate(scn);
            write_record(res.projected);
            summary["summary"] = to_json(summarize(res.lifted, scn.threshold));
            out.properties.push_back(PropertyResult::at_most("projection_consistency", res.max_consistency, 1e-6));
            break;
        }
        case Mode::Synchrony: {
            Scenario s = scn;
            s.innovation = Innovation::None;
            const TrajectoryRecord rec = simulate_projected(s);
            write_record(rec);
            summary["summary"] = to_json(summarize(rec, scn.threshold));
            out.properties.push_back(PropertyResult::at_most("synchrony", check_synchrony(rec), 1e-8));
            break;
        }
        case Mode::MonteCarlo: {
            const MonteCarloResult mc = monte_carlo(scn, scn.monte_carlo.runs, scn.seed);
            write_text(out_dir / "runs.csv", runs_csv(mc));
            json runs = json::array();
            for (const auto& r : mc.runs) runs.push_back(to_json(r));
            summary["summary"] = {{"runs", mc.runs.size()}, {"convergence_fraction", mc.convergence_fraction}};
            summary["runs"] = runs;
            out.properties.push_back(PropertyResult::at_least("convergence_fraction", mc.convergence_fraction, 1.0));
            break;
        }
        case Mode::Verify: {
            out.properties = run_verification(scn.k, scn.verify_samples, scn.seed);
            write_residuals(out_dir, out.properties);
            break;
        }
        }
    }

    json props = json::array();
    for (const auto& p : out.properties) props.push_back(to_json(p));
    summary["properties"] = props;
    const bool ok = all_pass(out.properties);
    summary["status"] = ok ? "pass" : "fail";
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    out.summary = std::move(summary);
    out.exit_code = ok ? kExitSuccess : kExitPropertyFailure;
    return out;
}

}  // namespace hobs

#endif  // HOBS_RUNNER_HPP
