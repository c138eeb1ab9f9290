#pragma once

#include "config.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "geometry.hpp"
#include "registry.hpp"
#include "relations.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "solver.hpp"
