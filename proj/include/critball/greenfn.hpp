#pragma once

#include "critball/greenfn/center.hpp"
#include "critball/greenfn/criticality.hpp"
#include "critball/greenfn/domain.hpp"
#include "critball/greenfn/helmholtz.hpp"
#include "critball/greenfn/images.hpp"
