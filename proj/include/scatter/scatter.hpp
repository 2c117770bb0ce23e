#pragma once

#include "scatter/decay.hpp"
#include "scatter/errors.hpp"
#include "scatter/filterbank.hpp"
#include "scatter/json_io.hpp"
#include "scatter/parallel.hpp"
#include "scatter/scattering.hpp"
#include "scatter/signal.hpp"
#include "scatter/signal_io.hpp"
#include "scatter/stationary.hpp"
