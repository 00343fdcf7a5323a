#pragma once

// Umbrella header.
#include "charmax/chargroup.hpp"
#include "charmax/delta.hpp"
#include "charmax/discrepancy.hpp"
#include "charmax/errors.hpp"
#include "charmax/json.hpp"
#include "charmax/numtheory.hpp"
#include "charmax/pipeline.hpp"
#include "charmax/rearrangement.hpp"
