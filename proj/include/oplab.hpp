#pragma once

#include "oplab/chain.hpp"
#include "oplab/dsl.hpp"
#include "oplab/errors.hpp"
#include "oplab/evaluate.hpp"
#include "oplab/matrix_io.hpp"
#include "oplab/spectral.hpp"
#include "oplab/verifier.hpp"
