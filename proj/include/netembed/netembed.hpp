#pragma once

#include "netembed/error.hpp"
#include "netembed/format.hpp"
#include "netembed/harness.hpp"
#include "netembed/io.hpp"
#include "netembed/metrics.hpp"
#include "netembed/model.hpp"
#include "netembed/oracle.hpp"
#include "netembed/solver_layered.hpp"
#include "netembed/solver_tree.hpp"
#include "netembed/solver_treewidth.hpp"
#include "netembed/tuple_domain.hpp"
