#pragma once

#include "ocokit/engine.hpp"
#include "ocokit/errors.hpp"
#include "ocokit/functions.hpp"
#include "ocokit/hash.hpp"
#include "ocokit/io.hpp"
#include "ocokit/jeo.hpp"
#include "ocokit/offline.hpp"
#include "ocokit/prox.hpp"
#include "ocokit/regret.hpp"
#include "ocokit/robust.hpp"
#include "ocokit/schedule.hpp"
#include "ocokit/version.hpp"
