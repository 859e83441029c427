// jfan.hpp: convenience umbrella for the whole library.
#pragma once

#include "aml.hpp"
#include "evaluator.hpp"
#include "gamma_calculus.hpp"
#include "io.hpp"
#include "ring.hpp"
#include "special_functions.hpp"
#include "spectra.hpp"
#include "streams.hpp"
