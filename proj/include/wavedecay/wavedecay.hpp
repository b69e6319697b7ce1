#pragma once

#include "analysis.hpp"
#include "certificates.hpp"
#include "config.hpp"
#include "integral_oracle.hpp"
#include "numerics.hpp"
#include "profiles.hpp"
#include "simulation.hpp"
#include "solver.hpp"
#include "verify.hpp"
