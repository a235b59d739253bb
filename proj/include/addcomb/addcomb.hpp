#pragma once

#include "addcomb/approx_count.hpp"
#include "addcomb/bsg.hpp"
#include "addcomb/constellation.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/hamming.hpp"
#include "addcomb/hashing.hpp"
#include "addcomb/io.hpp"
#include "addcomb/modular.hpp"
#include "addcomb/popular_exact.hpp"
#include "addcomb/small_doubling.hpp"
#include "addcomb/vecmath.hpp"
