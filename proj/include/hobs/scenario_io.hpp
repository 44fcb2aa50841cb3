// scenario_io.hpp
//
// JSON reading and writing of scenarios. Parsing is strict: unknown keys
// are rejected and every constraint violation names the offending field
// path (e.g. "integrator.step"). The schema is described in
// docs/scenario-schema.md.

#ifndef HOBS_SCENARIO_IO_HPP
#define HOBS_SCENARIO_IO_HPP

#include "hobs/scenario.hpp"
#include "hobs/simulation.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hobs {

using json = nlohmann::json;

/// Parse or validation failure at a field path.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path))
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace io {

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ScenarioError(path.empty() ? "<document>" : path, "expected an object");
    }
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) {
            ok = ok || it.key() == a;
        }
        if (!ok) {
            throw ScenarioError(join(path, it.key()), "unknown key");
        }
    }
}

inline double number(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw ScenarioError(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ScenarioError(path, "expected a finite number");
    }
    return v;
}

inline long long integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) {
        throw ScenarioError(path, "expected an integer");
    }
    return j.get<long long>();
}

inline std::string string(const json& j, const std::string& path)
{
    if (!j.is_string()) {
        throw ScenarioError(path, "expected a string");
    }
    return j.get<std::string>();
}

inline Vec3 vec3(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) {
        throw ScenarioError(path, "expected an array of 3 numbers");
    }
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]")};
}

inline Mat3 mat3(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) {
        throw ScenarioError(path, "expected 3 rows of 3 numbers");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        m.row(r) = vec3(j[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]").transpose();
    }
    return m;
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Mat3& m)
{
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    }
    return rows;
}

inline OutputPoint unit_vector(const json& j, const std::string& path, const std::string& name)
{
    const Vec3 v = vec3(j, path);
    try {
        return OutputPoint::from_unit(v);
    } catch (const std::invalid_argument&) {
        throw ScenarioError(path, name + " not unit norm");
    }
}

}  // namespace io

inline json to_json(const InputSignal& s)
{
    struct Visitor {
        json operator()(const signal::Constant& c) const
        {
            return {{"kind", "constant"}, {"value", io::to_json(c.value)}};
        }
        json operator()(const signal::Sinusoid& c) const
        {
            return {{"kind", "sinusoid"},
                    {"amplitude", io::to_json(c.amplitude)},
                    {"frequency_hz", c.frequency_hz},
                    {"phase", c.phase}};
        }
        json operator()(const signal::Piecewise& c) const
        {
            json values = json::array();
            for (const auto& v : c.values) {
                values.push_back(io::to_json(v));
            }
            return {{"kind", "piecewise"}, {"switch_times", c.switch_times}, {"values", values}};
        }
        json operator()(const signal::Sum& c) const
        {
            json terms = json::array();
            for (const auto& t : c.terms) {
                terms.push_back(to_json(t));
            }
            return {{"kind", "sum"}, {"terms", terms}};
        }
    };
    return std::visit(Visitor{}, s.variant());
}

inline InputSignal input_from_json(const json& j, const std::string& path)
{
    io::require_object(j, path);
    if (!j.contains("kind")) {
        throw ScenarioError(io::join(path, "kind"), "missing input kind");
    }
    const std::string kind = io::string(j["kind"], io::join(path, "kind"));
    if (kind == "constant") {
        io::reject_unknown(j, path, {"kind", "value"});
        return signal::Constant{j.contains("value") ? io::vec3(j["value"], io::join(path, "value")) : Vec3::Zero()};
    }
    if (kind == "sinusoid") {
        io::reject_unknown(j, path, {"kind", "amplitude", "frequency_hz", "phase"});
        signal::Sinusoid s;
        if (j.contains("amplitude")) s.amplitude = io::vec3(j["amplitude"], io::join(path, "amplitude"));
        if (j.contains("frequency_hz")) s.frequency_hz = io::number(j["frequency_hz"], io::join(path, "frequency_hz"));
        if (j.contains("phase")) s.phase = io::number(j["phase"], io::join(path, "phase"));
        if (s.frequency_hz < 0.0) {
            throw ScenarioError(io::join(path, "frequency_hz"), "must be non-negative");
        }
        return s;
    }
    if (kind == "piecewise") {
        io::reject_unknown(j, path, {"kind", "switch_times", "values"});
        signal::Piecewise p;
        const std::string tp = io::join(path, "switch_times");
        const std::string vp = io::join(path, "values");
        if (j.contains("switch_times")) {
            if (!j["switch_times"].is_array()) throw ScenarioError(tp, "expected an array");
            for (std::size_t i = 0; i < j["switch_times"].size(); ++i) {
                p.switch_times.push_back(io::number(j["switch_times"][i], tp + "[" + std::to_string(i) + "]"));
            }
        }
        if (!j.contains("values") || !j["values"].is_array()) {
            throw ScenarioError(vp, "expected an array of 3-vectors");
        }
        for (std::size_t i = 0; i < j["values"].size(); ++i) {
            p.values.push_back(io::vec3(j["values"][i], vp + "[" + std::to_string(i) + "]"));
        }
        try {
            return InputSignal(std::move(p));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(path, e.what());
        }
    }
    if (kind == "sum") {
        io::reject_unknown(j, path, {"kind", "terms"});
        const std::string tp = io::join(path, "terms");
        if (!j.contains("terms") || !j["terms"].is_array()) {
            throw ScenarioError(tp, "expected an array of inputs");
        }
        signal::Sum s;
        for (std::size_t i = 0; i < j["terms"].size(); ++i) {
            s.terms.push_back(input_from_json(j["terms"][i], tp + "[" + std::to_string(i) + "]"));
        }
        return s;
    }
    throw ScenarioError(io::join(path, "kind"), "unknown input kind '" + kind + "'");
}

namespace io {

inline InputSignal checked_input(const json& j, const std::string& path)
{
    // Piecewise validation runs in the InputSignal constructor.
    try {
        return input_from_json(j, path);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path, e.what());
    }
}

inline InitialState initial_state(const json& j, const std::string& path, Instance instance)
{
    require_object(j, path);
    reject_unknown(j, path, {"rotation", "output", "angle"});
    if (j.size() != 1) {
        throw ScenarioError(path, "expected exactly one of rotation, output, angle");
    }
    if (instance == Instance::So3S2) {
        if (j.contains("rotation")) {
            const std::string p = join(path, "rotation");
            try {
                return GroupElement::from_matrix(mat3(j["rotation"], p));
            } catch (const std::invalid_argument&) {
                throw ScenarioError(p, "rotation not in SO(3)");
            }
        }
        if (j.contains("output")) {
            return unit_vector(j["output"], join(path, "output"), "output");
        }
        throw ScenarioError(join(path, "angle"), "angle is only valid for so2-s1");
    }
    if (j.contains("angle")) {
        return circle::GroupAngle{circle::wrap(number(j["angle"], join(path, "angle")))};
    }
    if (j.contains("output")) {
        return circle::OutputAngle{circle::wrap(number(j["output"], join(path, "output")))};
    }
    throw ScenarioError(join(path, "rotation"), "rotation is only valid for so3-s2");
}

inline json initial_state_to_json(const InitialState& s)
{
    struct Visitor {
        json operator()(const GroupElement& g) const { return {{"rotation", to_json(g.matrix())}}; }
        json operator()(const OutputPoint& y) const { return {{"output", to_json(y.dir())}}; }
        json operator()(const circle::GroupAngle& a) const { return {{"angle", a.value}}; }
        json operator()(const circle::OutputAngle& a) const { return {{"output", a.value}}; }
    };
    return std::visit(Visitor{}, s);
}

template <class E>
E enum_value(const json& j, const std::string& path, std::initializer_list<std::pair<std::string_view, E>> table)
{
    const std::string s = string(j, path);
    std::string options;
    for (const auto& [name, value] : table) {
        if (s == name) {
            return value;
        }
        options += (options.empty() ? "" : ", ") + std::string(name);
    }
    throw ScenarioError(path, "unknown value '" + s + "' (expected one of: " + options + ")");
}

}  // namespace io

/// Builds a validated scenario from a parsed JSON document.
inline Scenario scenario_from_json(const json& doc)
{
    using namespace io;
    require_object(doc, "");
    reject_unknown(doc, "",
                   {"schema_version", "instance", "mode", "k", "y0", "input", "init", "integrator", "t_end",
                    "sample_every", "innovation", "threshold", "seed", "monte_carlo", "verify"});

    if (!doc.contains("instance")) {
        throw ScenarioError("instance", "missing required field");
    }
    const Instance instance = enum_value<Instance>(doc["instance"], "instance",
                                                   {{"so3-s2", Instance::So3S2}, {"so2-s1", Instance::So2S1}});
    Scenario s = default_scenario(instance);

    if (doc.contains("schema_version")) {
        const long long v = integer(doc["schema_version"], "schema_version");
        if (v != kSchemaVersion) {
            throw ScenarioError("schema_version", "unsupported version " + std::to_string(v));
        }
    }
    if (doc.contains("mode")) {
        s.mode = enum_value<Mode>(doc["mode"], "mode",
                                  {{"projected", Mode::Projected},
                                   {"lifted", Mode::Lifted},
                                   {"co-sim", Mode::CoSim},
                                   {"synchrony", Mode::Synchrony},
                                   {"monte-carlo", Mode::MonteCarlo},
                                   {"verify", Mode::Verify}});
    }
    if (doc.contains("k")) {
        s.k = number(doc["k"], "k");
        if (!(s.k > 0.0)) {
            throw ScenarioError("k", "gain must be positive");
        }
    }
    if (doc.contains("y0")) {
        if (instance == Instance::So3S2) {
            s.y0 = unit_vector(doc["y0"], "y0", "y0");
        } else {
            s.y0_angle = circle::wrap(number(doc["y0"], "y0"));
        }
    }
    if (doc.contains("input")) {
        s.input = checked_input(doc["input"], "input");
    }
    if (doc.contains("init")) {
        const json& init = doc["init"];
        require_object(init, "init");
        reject_unknown(init, "init", {"plant", "observer"});
        if (init.contains("plant")) s.plant = initial_state(init["plant"], "init.plant", instance);
        if (init.contains("observer")) s.observer = initial_state(init["observer"], "init.observer", instance);
    }
    if (doc.contains("integrator")) {
        const json& in = doc["integrator"];
        require_object(in, "integrator");
        reject_unknown(in, "integrator", {"method", "step"});
        if (in.contains("method")) {
            s.integrator.method = enum_value<IntegratorMethod>(
                in["method"], "integrator.method",
                {{"lie-euler", IntegratorMethod::LieEuler}, {"rk4-project", IntegratorMethod::Rk4Project}});
        }
        if (in.contains("step")) s.integrator.step = number(in["step"], "integrator.step");
    }
    if (!(s.integrator.step > 0.0)) {
        throw ScenarioError("integrator.step", "step must be positive");
    }
    if (s.integrator.step > kMaxStep) {
        throw ScenarioError("integrator.step", "step must not exceed 1e-2 s");
    }
    if (doc.contains("t_end")) {
        s.t_end = number(doc["t_end"], "t_end");
        if (!(s.t_end > 0.0)) throw ScenarioError("t_end", "must be positive");
    }
    if (doc.contains("sample_every")) {
        const long long n = integer(doc["sample_every"], "sample_every");
        if (n < 1 || n > 1'000'000'000) throw ScenarioError("sample_every", "must be a positive step count");
        s.sample_every = static_cast<int>(n);
    }
    if (doc.contains("innovation")) {
        s.innovation = enum_value<Innovation>(doc["innovation"], "innovation",
                                              {{"gradient", Innovation::Gradient},
                                               {"none", Innovation::None},
                                               {"non-invariant", Innovation::NonInvariant}});
    }
    if (doc.contains("threshold")) {
        s.threshold = number(doc["threshold"], "threshold");
        if (!(s.threshold > 0.0)) throw ScenarioError("threshold", "must be positive");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
            throw ScenarioError("seed", "expected a non-negative integer");
        }
        s.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("monte_carlo")) {
        const json& mc = doc["monte_carlo"];
        require_object(mc, "monte_carlo");
        reject_unknown(mc, "monte_carlo", {"runs", "model", "antipodal_exclusion", "threads"});
        if (mc.contains("runs")) {
            const long long n = integer(mc["runs"], "monte_carlo.runs");
            if (n < 1 || n > 10'000'000) throw ScenarioError("monte_carlo.runs", "must be at least 1");
            s.monte_carlo.runs = static_cast<int>(n);
        }
        if (mc.contains("model")) {
            s.monte_carlo.model = enum_value<SweepModel>(
                mc["model"], "monte_carlo.model", {{"projected", SweepModel::Projected}, {"lifted", SweepModel::Lifted}});
        }
        if (mc.contains("antipodal_exclusion")) {
            s.monte_carlo.antipodal_exclusion = number(mc["antipodal_exclusion"], "monte_carlo.antipodal_exclusion");
            if (!(s.monte_carlo.antipodal_exclusion >= 0.0) || s.monte_carlo.antipodal_exclusion >= std::numbers::pi) {
                throw ScenarioError("monte_carlo.antipodal_exclusion", "must lie in [0, pi)");
            }
        }
        if (mc.contains("threads")) {
            const long long n = integer(mc["threads"], "monte_carlo.threads");
            if (n < 1 || n > 1024) throw ScenarioError("monte_carlo.threads", "must lie in [1, 1024]");
            s.monte_carlo.threads = static_cast<int>(n);
        }
    }
    if (doc.contains("verify")) {
        const json& v = doc["verify"];
        require_object(v, "verify");
        reject_unknown(v, "verify", {"samples"});
        if (v.contains("samples")) {
            const long long n = integer(v["samples"], "verify.samples");
            if (n < 1 || n > 100'000'000) throw ScenarioError("verify.samples", "must be at least 1");
            s.verify_samples = static_cast<int>(n);
        }
    }

    if (instance == Instance::So2S1 && (s.mode == Mode::MonteCarlo || s.mode == Mode::CoSim)) {
        throw ScenarioError("mode", to_string(s.mode) + " is only available for so3-s2");
    }
    return s;
}

/// Parses and validates a JSON scenario document.
inline Scenario parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("<document>", std::string("malformed JSON: ") + e.what());
    }
    return scenario_from_json(doc);
}

/// Complete JSON echo of a scenario; parse_scenario inverts it exactly.
inline json scenario_to_json(const Scenario& s)
{
    json j;
    j["schema_version"] = s.schema_version;
    j["instance"] = to_string(s.instance);
    j["mode"] = to_string(s.mode);
    j["k"] = s.k;
    if (s.instance == Instance::So3S2) {
        j["y0"] = io::to_json(s.y0.dir());
    } else {
        j["y0"] = s.y0_angle;
    }
    j["input"] = to_json(s.input);
    j["init"] = {{"plant", io::initial_state_to_json(s.plant)}, {"observer", io::initial_state_to_json(s.observer)}};
    j["integrator"] = {{"method", to_string(s.integrator.method)}, {"step", s.integrator.step}};
    j["t_end"] = s.t_end;
    j["sample_every"] = s.sample_every;
    j["innovation"] = to_string(s.innovation);
    j["threshold"] = s.threshold;
    j["seed"] = s.seed;
    j["monte_carlo"] = {{"runs", s.monte_carlo.runs},
                        {"model", to_string(s.monte_carlo.model)},
                        {"antipodal_exclusion", s.monte_carlo.antipodal_exclusion},
                        {"threads", s.monte_carlo.threads}};
    j["verify"] = {{"samples", s.verify_samples}};
    return j;
}

}  // namespace hobs

#endif  // HOBS_SCENARIO_IO_HPP
