#pragma once

#include "sense/config.hpp"
#include "sense/constants.hpp"
#include "sense/dynamics.hpp"
#include "sense/errors.hpp"
#include "sense/io.hpp"
#include "sense/normal_mode.hpp"
#include "sense/params.hpp"
#include "sense/presets.hpp"
#include "sense/spectrum.hpp"
#include "sense/steady_state.hpp"
#include "sense/sweep.hpp"
#include "sense/version.hpp"
