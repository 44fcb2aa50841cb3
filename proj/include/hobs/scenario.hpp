// scenario.hpp
//
// A complete simulation description. Serialization lives in scenario_io.hpp.

#ifndef HOBS_SCENARIO_HPP
#define HOBS_SCENARIO_HPP

#include "hobs/circle.hpp"
#include "hobs/integrator.hpp"
#include "hobs/manifold.hpp"
#include "hobs/systems.hpp"

#include <cstdint>
#include <numbers>
#include <string>
#include <variant>

namespace hobs {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

enum class Instance { So3S2, So2S1 };

enum class Mode { Projected, Lifted, CoSim, Synchrony, MonteCarlo, Verify };

/// Innovation term used by the output-space observer.
enum class Innovation {
    Gradient,      // -grad_1 f for the invariant cost
    None,          // internal model only
    NonInvariant,  // -grad_1 of the anisotropic cost (symmetry-breaking control)
};

enum class SweepModel { Projected, Lifted };

/// Initial state of plant or observer: a group element or an output point,
/// in the representation of the scenario's instance.
using InitialState = std::variant<GroupElement, OutputPoint, circle::GroupAngle, circle::OutputAngle>;

struct MonteCarloSpec {
    int runs = 100;
    SweepModel model = SweepModel::Projected;
    double antipodal_exclusion = 0.01;  // rad
    int threads = 1;
};

struct Scenario {
    int schema_version = kSchemaVersion;
    Instance instance = Instance::So3S2;
    double k = 1.0;
    OutputPoint y0 = OutputPoint::e3();
    double y0_angle = 0.0;  // S^1 reference
    InputSignal input;
    InitialState plant = GroupElement::identity();
    InitialState observer = OutputPoint::e1();
    IntegratorSpec integrator;
    double t_end = 10.0;
    int sample_every = 10;
    Mode mode = Mode::Projected;
    Innovation innovation = Innovation::Gradient;
    double threshold = 1e-3;  // rad
    std::uint64_t seed = 1;
    MonteCarloSpec monte_carlo;
    int verify_samples = 1000;
};

/// Defaults appropriate for the instance: identity plant and an observer
/// a quarter turn away.
inline Scenario default_scenario(Instance instance)
{
    Scenario s;
    s.instance = instance;
    if (instance == Instance::So2S1) {
        s.plant = circle::GroupAngle{0.0};
        s.observer = circle::OutputAngle{0.5 * std::numbers::pi};
    }
    return s;
}

inline std::string to_string(Instance i) { return i == Instance::So3S2 ? "so3-s2" : "so2-s1"; }

inline std::string to_string(Mode m)
{
    switch (m) {
    case Mode::Projected: return "projected";
    case Mode::Lifted: return "lifted";
    case Mode::CoSim: return "co-sim";
    case Mode::Synchrony: return "synchrony";
    case Mode::MonteCarlo: return "monte-carlo";
    case Mode::Verify: return "verify";
    }
    return "?";
}

inline std::string to_string(Innovation i)
{
    switch (i) {
    case Innovation::Gradient: return "gradient";
    case Innovation::None: return "none";
    case Innovation::NonInvariant: return "non-invariant";
    }
    return "?";
}

inline std::string to_string(SweepModel m) { return m == SweepModel::Projected ? "projected" : "lifted"; }

}  // namespace hobs

#endif  // HOBS_SCENARIO_HPP
