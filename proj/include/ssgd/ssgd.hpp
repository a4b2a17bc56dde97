#pragma once

#include "ssgd/pauli.hpp"
#include "ssgd/state.hpp"
#include "ssgd/models.hpp"
#include "ssgd/generators.hpp"
#include "ssgd/random.hpp"
#include "ssgd/optimizer.hpp"
#include "ssgd/verification.hpp"
#include "ssgd/experiment.hpp"
