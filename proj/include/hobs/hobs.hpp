// hobs.hpp: umbrella header.

#ifndef HOBS_HOBS_HPP
#define HOBS_HOBS_HPP

#include "hobs/circle.hpp"
#include "hobs/integrator.hpp"
#include "hobs/manifold.hpp"
#include "hobs/observer.hpp"
#include "hobs/random.hpp"
#include "hobs/runner.hpp"
#include "hobs/scenario.hpp"
#include "hobs/scenario_io.hpp"
#include "hobs/simulation.hpp"
#include "hobs/systems.hpp"
#include "hobs/verify.hpp"

#endif  // HOBS_HOBS_HPP
