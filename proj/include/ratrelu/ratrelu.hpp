#pragma once

#include "ratrelu/numcore.hpp"
#include "ratrelu/algebra.hpp"
#include "ratrelu/newman.hpp"
#include "ratrelu/relunet.hpp"
#include "ratrelu/net2rat.hpp"
#include "ratrelu/gadgets.hpp"
#include "ratrelu/bounds.hpp"
#include "ratrelu/fitlab.hpp"
#include "ratrelu/figures.hpp"
