#pragma once

#include "corners/errors.hpp"
#include "corners/linalg.hpp"
#include "corners/random.hpp"
#include "corners/block.hpp"
#include "corners/completions.hpp"
#include "corners/extremal.hpp"
#include "corners/interchange.hpp"
