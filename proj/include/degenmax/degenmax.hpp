#pragma once

#include "degenmax/acceptance.hpp"
#include "degenmax/coefficient_transform.hpp"
#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/domain.hpp"
#include "degenmax/expression.hpp"
#include "degenmax/fd_solver.hpp"
#include "degenmax/io.hpp"
#include "degenmax/obstacle.hpp"
#include "degenmax/operator_core.hpp"
#include "degenmax/perturbation.hpp"
#include "degenmax/problem.hpp"
#include "degenmax/special_functions.hpp"
