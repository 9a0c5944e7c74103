#pragma once

#include "critball/solver/diagnostics.hpp"
#include "critball/solver/problem.hpp"
#include "critball/solver/shooting.hpp"
#include "critball/solver/solution.hpp"
