// bellmem.hpp - umbrella header

#pragma once

#include "bellmem/backflow.hpp"
#include "bellmem/config.hpp"
#include "bellmem/csv.hpp"
#include "bellmem/diagnostics.hpp"
#include "bellmem/discrete_bath.hpp"
#include "bellmem/model.hpp"
#include "bellmem/observables.hpp"
#include "bellmem/parallel.hpp"
#include "bellmem/pipelines.hpp"
#include "bellmem/pseudomode.hpp"
#include "bellmem/sensing.hpp"
