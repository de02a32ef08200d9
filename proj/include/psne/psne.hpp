#pragma once

// Umbrella header for the library.

#include "psne/bai.hpp"
#include "psne/baselines.hpp"
#include "psne/equilibrium.hpp"
#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/harness.hpp"
#include "psne/instance_io.hpp"
#include "psne/instances.hpp"
#include "psne/midsearch.hpp"
#include "psne/midval.hpp"
#include "psne/oracle.hpp"
#include "psne/rng.hpp"
#include "psne/run.hpp"
#include "psne/verify.hpp"
