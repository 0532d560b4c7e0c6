#pragma once

#include "econ_ensemble/dos.hpp"
#include "econ_ensemble/ensemble.hpp"
#include "econ_ensemble/equilibria.hpp"
#include "econ_ensemble/errors.hpp"
#include "econ_ensemble/microstates.hpp"
#include "econ_ensemble/variational.hpp"
