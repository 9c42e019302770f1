#pragma once

#include "elastoblow/convergence.hpp"
#include "elastoblow/core_types.hpp"
#include "elastoblow/diagnostics.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/eos.hpp"
#include "elastoblow/error.hpp"
#include "elastoblow/initdata.hpp"
#include "elastoblow/io/checkpoint.hpp"
#include "elastoblow/io/commands.hpp"
#include "elastoblow/io/config.hpp"
#include "elastoblow/io/csv.hpp"
#include "elastoblow/solver.hpp"
#include "elastoblow/symhyp.hpp"
