#pragma once

#include "whitekit/errors.hpp"
#include "whitekit/isoscore.hpp"
#include "whitekit/matrix_stats.hpp"
#include "whitekit/probes.hpp"
#include "whitekit/report.hpp"
#include "whitekit/store.hpp"
#include "whitekit/sts.hpp"
#include "whitekit/whitening.hpp"
