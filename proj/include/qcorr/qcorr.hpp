#pragma once

#include "qcorr/analysis.hpp"
#include "qcorr/channel.hpp"
#include "qcorr/correlations.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/states.hpp"
