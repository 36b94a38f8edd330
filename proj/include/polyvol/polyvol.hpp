#pragma once

#include "polyvol/common.hpp"
#include "polyvol/geometry.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/volume_polynomial.hpp"
#include "polyvol/shapes.hpp"
#include "polyvol/model.hpp"
#include "polyvol/sampler.hpp"
#include "polyvol/stats.hpp"
#include "polyvol/root_finding.hpp"
#include "polyvol/nelder_mead.hpp"
#include "polyvol/estimators2d.hpp"
#include "polyvol/estimators3d.hpp"
#include "polyvol/harness.hpp"
