#pragma once

#include "spreadout/oracle/convolution.hpp"
#include "spreadout/oracle/instances.hpp"
#include "spreadout/oracle/verify.hpp"
