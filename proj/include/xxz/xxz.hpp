#pragma once

// Everything in one include.

#include "xxz/core.hpp"
#include "xxz/hyperbolic_product.hpp"
#include "xxz/scalars.hpp"
#include "xxz/qfunction.hpp"
#include "xxz/operators.hpp"
#include "xxz/hamiltonians.hpp"
#include "xxz/spectrum.hpp"
#include "xxz/record.hpp"
#include "xxz/golden.hpp"
#include "xxz/bethe_solver.hpp"
#include "xxz/config.hpp"
#include "xxz/cli.hpp"
