#pragma once

// Umbrella header: the whole library.

#include "algebraic.hpp"
#include "automaton.hpp"
#include "ball.hpp"
#include "classify.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "fixture_checks.hpp"
#include "fixtures.hpp"
#include "fourier.hpp"
#include "matrix.hpp"
#include "parry.hpp"
#include "report.hpp"
#include "zero_automaton.hpp"
