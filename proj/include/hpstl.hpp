#pragma once

// Umbrella header.

#include "hpstl/error.hpp"
#include "hpstl/io/config.hpp"
#include "hpstl/io/report.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/formula.hpp"
#include "hpstl/logic/parser.hpp"
#include "hpstl/logic/printer.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/ctmc.hpp"
#include "hpstl/models/hybrid.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/models/queue.hpp"
#include "hpstl/models/random.hpp"
#include "hpstl/semantics/evaluator.hpp"
#include "hpstl/semantics/trace.hpp"
#include "hpstl/smc/joint.hpp"
#include "hpstl/smc/nested_path.hpp"
#include "hpstl/smc/nested_state.hpp"
#include "hpstl/smc/sampling.hpp"
#include "hpstl/smc/simple.hpp"
#include "hpstl/smc/types.hpp"
#include "hpstl/smc/verify.hpp"
#include "hpstl/stats/beta.hpp"
#include "hpstl/stats/clopper_pearson.hpp"
#include "hpstl/stats/region.hpp"
