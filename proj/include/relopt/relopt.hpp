#ifndef RELOPT_RELOPT_HPP_
#define RELOPT_RELOPT_HPP_

#include "relopt/core.hpp"
#include "relopt/diagnostics.hpp"
#include "relopt/models.hpp"
#include "relopt/solvers.hpp"

#endif  // RELOPT_RELOPT_HPP_
