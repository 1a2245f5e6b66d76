#pragma once

// Umbrella header: mean recovery for uniform spherical Gaussian mixtures by
// the method of moments, with the structural diagnostics (pair correlation
// factor, Bombieri/Beauzamy perturbation bounds, sample-complexity formulas)
// that predict how hard a mixture is to learn.

#include "mixmom/analysis.hpp"
#include "mixmom/constants.hpp"
#include "mixmom/mixture.hpp"
#include "mixmom/moments.hpp"
#include "mixmom/newton.hpp"
#include "mixmom/pipeline.hpp"
#include "mixmom/rng.hpp"
#include "mixmom/sampling.hpp"
#include "mixmom/scenario.hpp"
