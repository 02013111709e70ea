#pragma once

// Umbrella header.

#include "critmeasure/mesh.hpp"
#include "critmeasure/quadrature.hpp"
#include "critmeasure/fe_space.hpp"
#include "critmeasure/regularizer.hpp"
#include "critmeasure/functions.hpp"
#include "critmeasure/pde.hpp"
#include "critmeasure/objectives.hpp"
#include "critmeasure/criticality.hpp"
#include "critmeasure/solvers.hpp"
#include "critmeasure/problems.hpp"
#include "critmeasure/budget.hpp"
#include "critmeasure/study.hpp"
#include "critmeasure/config.hpp"
#include "critmeasure/verify.hpp"
