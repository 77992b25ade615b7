#pragma once

#include "goc/board.hpp"
#include "goc/error.hpp"
#include "goc/rules.hpp"
#include "goc/server.hpp"
#include "goc/solver.hpp"
#include "goc/strategy.hpp"
#include "goc/suites.hpp"
#include "goc/symmetry.hpp"
#include "goc/verify.hpp"
