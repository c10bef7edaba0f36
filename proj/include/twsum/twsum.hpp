#ifndef TWSUM_TWSUM_HPP
#define TWSUM_TWSUM_HPP

#include "rational.hpp"
#include "modint.hpp"
#include "ffield.hpp"
#include "padic.hpp"
#include "polygons.hpp"
#include "charsum.hpp"
#include "dwork.hpp"
#include "io.hpp"
#include "harness.hpp"

#endif  // TWSUM_TWSUM_HPP
