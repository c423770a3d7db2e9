#pragma once

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/generators.hpp"
#include "morrey/grid.hpp"
#include "morrey/harness.hpp"
#include "morrey/hash.hpp"
#include "morrey/hedberg.hpp"
#include "morrey/io.hpp"
#include "morrey/norms.hpp"
#include "morrey/operators.hpp"
#include "morrey/sparse.hpp"
