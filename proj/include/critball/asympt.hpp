#pragma once

#include "critball/asympt/coercivity.hpp"
#include "critball/asympt/decompose.hpp"
#include "critball/asympt/fit.hpp"
#include "critball/asympt/verify.hpp"
