#pragma once

#include "critball/bubble/bubble.hpp"
#include "critball/bubble/lemmas.hpp"
#include "critball/bubble/projected.hpp"
