#pragma once

#include "spreadout/estimators/basic.hpp"
#include "spreadout/estimators/bootstrap.hpp"
#include "spreadout/estimators/error_terms.hpp"
#include "spreadout/estimators/fit.hpp"
#include "spreadout/estimators/graph_mc.hpp"
#include "spreadout/estimators/scalars.hpp"
#include "spreadout/estimators/triangle.hpp"
