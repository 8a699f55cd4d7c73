#pragma once

#include "lossbound/error.hpp"
#include "lossbound/rng.hpp"
#include "lossbound/stage_game.hpp"
#include "lossbound/families.hpp"
#include "lossbound/knowledge.hpp"
#include "lossbound/learners.hpp"
#include "lossbound/opponents.hpp"
#include "lossbound/sim.hpp"
#include "lossbound/io.hpp"
#include "lossbound/verify.hpp"
#include "lossbound/config.hpp"
#include "lossbound/cli.hpp"
