#pragma once

#include "vism/basis.hpp"
#include "vism/calibration.hpp"
#include "vism/cli.hpp"
#include "vism/eigen.hpp"
#include "vism/errors.hpp"
#include "vism/hamiltonian.hpp"
#include "vism/interpolant.hpp"
#include "vism/matrix.hpp"
#include "vism/numeric.hpp"
#include "vism/optimize.hpp"
#include "vism/potential.hpp"
#include "vism/quadrature.hpp"
#include "vism/reference.hpp"
#include "vism/solution.hpp"
