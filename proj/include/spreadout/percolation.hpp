#pragma once

#include "spreadout/percolation/cluster.hpp"
#include "spreadout/percolation/disjoint.hpp"
#include "spreadout/percolation/finite_graph.hpp"
#include "spreadout/percolation/graph_cluster.hpp"
