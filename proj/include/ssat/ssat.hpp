#pragma once

#include "ssat/ablation.hpp"
#include "ssat/assignment.hpp"
#include "ssat/association.hpp"
#include "ssat/config.hpp"
#include "ssat/error.hpp"
#include "ssat/features.hpp"
#include "ssat/geometry.hpp"
#include "ssat/metrics.hpp"
#include "ssat/motio.hpp"
#include "ssat/render.hpp"
#include "ssat/sim.hpp"
#include "ssat/tracker.hpp"
