#pragma once

#include "spreadout/randwalk/ornstein.hpp"
#include "spreadout/randwalk/step.hpp"
#include "spreadout/randwalk/walks.hpp"
