#ifndef RELOPT_MODELS_HPP_
#define RELOPT_MODELS_HPP_

#include "relopt/models/discrete_grid.hpp"
#include "relopt/models/examples_1d.hpp"
#include "relopt/models/telecom.hpp"
#include "relopt/models/waste.hpp"

#endif  // RELOPT_MODELS_HPP_
