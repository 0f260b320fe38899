#pragma once

#include "taflab/chains.hpp"
#include "taflab/digraph_algebra.hpp"
#include "taflab/distance.hpp"
#include "taflab/error.hpp"
#include "taflab/ideal.hpp"
#include "taflab/matrix_unit.hpp"
#include "taflab/nestrep.hpp"
#include "taflab/spectrum.hpp"
#include "taflab/tower.hpp"
#include "taflab/tribool.hpp"
