#pragma once

#include "signfj/lifted_system.hpp"
#include "signfj/opinions.hpp"
#include "signfj/optimize.hpp"
#include "signfj/phenomena.hpp"
#include "signfj/rng.hpp"
#include "signfj/signed_graph.hpp"
#include "signfj/solver.hpp"
#include "signfj/version.hpp"
#include "signfj/walks.hpp"
