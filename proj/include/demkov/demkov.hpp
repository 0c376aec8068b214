#pragma once

#include "demkov/core.hpp"
#include "demkov/error.hpp"
#include "demkov/model.hpp"
#include "demkov/oracle.hpp"
#include "demkov/precision.hpp"
#include "demkov/resonant.hpp"
#include "demkov/specialfn.hpp"
