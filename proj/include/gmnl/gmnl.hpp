#pragma once

#include "gmnl/bellgame.hpp"
#include "gmnl/bitstring.hpp"
#include "gmnl/certify.hpp"
#include "gmnl/density.hpp"
#include "gmnl/distill.hpp"
#include "gmnl/errors.hpp"
#include "gmnl/io.hpp"
#include "gmnl/kv.hpp"
#include "gmnl/multiindex.hpp"
#include "gmnl/netgraph.hpp"
#include "gmnl/network_game.hpp"
#include "gmnl/parallel.hpp"
#include "gmnl/rational.hpp"
#include "gmnl/rng.hpp"

namespace gmnl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gmnl
