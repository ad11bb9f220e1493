#pragma once

#include "equiline/errors.hpp"
#include "equiline/finfield.hpp"
#include "equiline/heisenberg.hpp"
#include "equiline/weil.hpp"
#include "equiline/lineset.hpp"
#include "equiline/fiducial.hpp"
#include "equiline/action.hpp"
#include "equiline/io.hpp"
