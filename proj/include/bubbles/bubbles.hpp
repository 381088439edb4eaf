#pragma once

#include "bubbles/analyze.hpp"
#include "bubbles/cluster.hpp"
#include "bubbles/cluster_io.hpp"
#include "bubbles/commands.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/errors.hpp"
#include "bubbles/evolver.hpp"
#include "bubbles/experiment.hpp"
#include "bubbles/geometry.hpp"
#include "bubbles/hessian.hpp"
#include "bubbles/point.hpp"
#include "bubbles/quadrature.hpp"
#include "bubbles/seeds.hpp"
#include "bubbles/surgery.hpp"
#include "bubbles/svg.hpp"
