#pragma once

#include "knotderiv/autgroup.hpp"
#include "knotderiv/coloring.hpp"
#include "knotderiv/config.hpp"
#include "knotderiv/derivations.hpp"
#include "knotderiv/diagram.hpp"
#include "knotderiv/io.hpp"
#include "knotderiv/permutation.hpp"
#include "knotderiv/polynomial.hpp"
#include "knotderiv/quandle.hpp"
#include "knotderiv/search.hpp"
#include "knotderiv/virtual_knots.hpp"
