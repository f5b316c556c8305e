#pragma once

#include "frameflow/angles.hpp"
#include "frameflow/dedicated.hpp"
#include "frameflow/energy.hpp"
#include "frameflow/geometry.hpp"
#include "frameflow/graph.hpp"
#include "frameflow/harness.hpp"
#include "frameflow/init.hpp"
#include "frameflow/mesh.hpp"
#include "frameflow/meshgen.hpp"
#include "frameflow/optimize.hpp"
#include "frameflow/svg.hpp"
#include "frameflow/topology.hpp"
