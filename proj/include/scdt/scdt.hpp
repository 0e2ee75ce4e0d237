// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scdt/errors.hpp"
#include "scdt/extended_real.hpp"
#include "scdt/step_function.hpp"
#include "scdt/measures.hpp"
#include "scdt/transform.hpp"
#include "scdt/metrics.hpp"
#include "scdt/genmodel.hpp"
#include "scdt/classify.hpp"
