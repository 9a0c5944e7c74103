#pragma once

#include "critball/numkit/fit.hpp"
#include "critball/numkit/ode.hpp"
#include "critball/numkit/quadrature.hpp"
#include "critball/numkit/roots.hpp"
#include "critball/numkit/special.hpp"
