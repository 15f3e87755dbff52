#pragma once

// Umbrella header for the qplasm toolkit.

#include "qplasm/channels.hpp"
#include "qplasm/config.hpp"
#include "qplasm/errors.hpp"
#include "qplasm/estimate.hpp"
#include "qplasm/fock.hpp"
#include "qplasm/gaussian.hpp"
#include "qplasm/io.hpp"
#include "qplasm/material.hpp"
#include "qplasm/mc.hpp"
#include "qplasm/rng.hpp"
#include "qplasm/scenarios.hpp"
#include "qplasm/states.hpp"
#include "qplasm/transduce.hpp"
#include "qplasm/units.hpp"
