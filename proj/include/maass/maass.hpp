#pragma once

#include "maass/errors.hpp"
#include "maass/numerics.hpp"
#include "maass/arithmetic.hpp"
#include "maass/quadforms.hpp"
#include "maass/maass_form.hpp"
#include "maass/hejhal.hpp"
#include "maass/lfunctions.hpp"
#include "maass/poincare.hpp"
#include "maass/cycles.hpp"
#include "maass/harness.hpp"
