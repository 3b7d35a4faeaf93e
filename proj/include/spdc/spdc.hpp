#pragma once

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/filter.hpp"
#include "spdc/grid.hpp"
#include "spdc/hom.hpp"
#include "spdc/jsa.hpp"
#include "spdc/jsi.hpp"
#include "spdc/phase_matching.hpp"
#include "spdc/profiles.hpp"
#include "spdc/pump.hpp"
#include "spdc/rates.hpp"
#include "spdc/report.hpp"
#include "spdc/scenario.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/source.hpp"
#include "spdc/units.hpp"
