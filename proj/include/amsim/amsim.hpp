#pragma once

#include "amsim/allocation.hpp"
#include "amsim/controller.hpp"
#include "amsim/coupling.hpp"
#include "amsim/delta.hpp"
#include "amsim/dynamics.hpp"
#include "amsim/errors.hpp"
#include "amsim/interaction.hpp"
#include "amsim/io.hpp"
#include "amsim/math.hpp"
#include "amsim/scenario.hpp"
#include "amsim/simulator.hpp"
#include "amsim/stiffness.hpp"
#include "amsim/synthetic.hpp"
