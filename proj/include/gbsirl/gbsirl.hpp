#pragma once

// Umbrella header: Bayesian active task identification from noisy expert
// feedback over a finite reward-hypothesis space, with binary-search style
// query selection, simulated oracles, benchmark domains and a Monte-Carlo
// experiment harness.

#include "gbsirl/bayes.hpp"
#include "gbsirl/common.hpp"
#include "gbsirl/environments.hpp"
#include "gbsirl/experiment.hpp"
#include "gbsirl/hypothesis.hpp"
#include "gbsirl/linprog.hpp"
#include "gbsirl/mdp.hpp"
#include "gbsirl/oracle.hpp"
#include "gbsirl/serialize.hpp"
#include "gbsirl/strategies.hpp"
