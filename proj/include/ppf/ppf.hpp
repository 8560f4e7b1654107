#pragma once

#include "ppf/bench.hpp"
#include "ppf/coeff.hpp"
#include "ppf/dft.hpp"
#include "ppf/errors.hpp"
#include "ppf/fir.hpp"
#include "ppf/pipeline.hpp"
