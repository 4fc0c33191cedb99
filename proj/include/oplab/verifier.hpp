#pragma once

#include "oplab/verifier/campaign.hpp"
#include "oplab/verifier/parallel.hpp"
#include "oplab/verifier/pgrid.hpp"
#include "oplab/verifier/probes.hpp"
#include "oplab/verifier/proof.hpp"
#include "oplab/verifier/random.hpp"
#include "oplab/verifier/search.hpp"
#include "oplab/verifier/tuple.hpp"
