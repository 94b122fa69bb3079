#pragma once

// Umbrella header for the extended-probability toolkit.

#include "xprob/errors.hpp"
#include "xprob/state_space.hpp"
#include "xprob/event.hpp"
#include "xprob/measure.hpp"
#include "xprob/simplex.hpp"
#include "xprob/coherence.hpp"
#include "xprob/split.hpp"
#include "xprob/dynamics.hpp"
#include "xprob/credal.hpp"
#include "xprob/core.hpp"
#include "xprob/species.hpp"
#include "xprob/opinion.hpp"
