#pragma once

#include "rothe/error.hpp"
#include "rothe/graph.hpp"
#include "rothe/lattice.hpp"
#include "rothe/domain.hpp"
#include "rothe/field.hpp"
#include "rothe/calculus.hpp"
#include "rothe/operator.hpp"
#include "rothe/trajectory.hpp"
#include "rothe/heat.hpp"
#include "rothe/spectral.hpp"
#include "rothe/forcing.hpp"
#include "rothe/vi.hpp"
#include "rothe/io.hpp"
