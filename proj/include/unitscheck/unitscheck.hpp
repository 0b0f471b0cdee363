#pragma once

#include "unitscheck/ast.hpp"
#include "unitscheck/cli.hpp"
#include "unitscheck/constraints.hpp"
#include "unitscheck/lexer.hpp"
#include "unitscheck/parser.hpp"
#include "unitscheck/rational.hpp"
#include "unitscheck/report.hpp"
#include "unitscheck/solver.hpp"
#include "unitscheck/units.hpp"
