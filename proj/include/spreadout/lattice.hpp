#pragma once

#include "spreadout/core/errors.hpp"
#include "spreadout/core/estimate.hpp"
#include "spreadout/core/model.hpp"
#include "spreadout/core/parallel.hpp"
#include "spreadout/core/point.hpp"
#include "spreadout/core/region.hpp"
#include "spreadout/core/rng.hpp"
