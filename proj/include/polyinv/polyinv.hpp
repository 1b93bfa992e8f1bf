#pragma once

#include "polyinv/errors.hpp"
#include "polyinv/family.hpp"
#include "polyinv/gf.hpp"
#include "polyinv/invariants.hpp"
#include "polyinv/io.hpp"
#include "polyinv/lattice.hpp"
#include "polyinv/polygon.hpp"
#include "polyinv/random_datum.hpp"
#include "polyinv/rational.hpp"
#include "polyinv/ring.hpp"
#include "polyinv/svg.hpp"
