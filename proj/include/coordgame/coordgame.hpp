#pragma once

#include "coordgame/dynamics.hpp"
#include "coordgame/equilibrium.hpp"
#include "coordgame/error.hpp"
#include "coordgame/game.hpp"
#include "coordgame/io.hpp"
#include "coordgame/oracle.hpp"
#include "coordgame/reductions.hpp"
#include "coordgame/solve.hpp"
#include "coordgame/solvers.hpp"
