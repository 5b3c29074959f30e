#pragma once

#include "quadtune/campaign.hpp"
#include "quadtune/controller.hpp"
#include "quadtune/dynamics.hpp"
#include "quadtune/io.hpp"
#include "quadtune/metrics.hpp"
#include "quadtune/objective.hpp"
#include "quadtune/optimizer.hpp"
#include "quadtune/rng.hpp"
#include "quadtune/types.hpp"
