#pragma once

// Umbrella header.

#include "madel/branches.hpp"
#include "madel/coulomb.hpp"
#include "madel/errors.hpp"
#include "madel/grid.hpp"
#include "madel/io.hpp"
#include "madel/ksmap.hpp"
#include "madel/madelung.hpp"
#include "madel/oracle.hpp"
#include "madel/phases.hpp"
#include "madel/scattering.hpp"
#include "madel/units.hpp"
