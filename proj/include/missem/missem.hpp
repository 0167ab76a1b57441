#pragma once

// Umbrella header.

#include "missem/cli.hpp"
#include "missem/density.hpp"
#include "missem/error.hpp"
#include "missem/impute.hpp"
#include "missem/ingest.hpp"
#include "missem/model_spec.hpp"
#include "missem/pattern.hpp"
#include "missem/report.hpp"
#include "missem/rng.hpp"
#include "missem/space.hpp"
#include "missem/verify.hpp"
#include "missem/version.hpp"
