#pragma once

#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/smc/joint.hpp"
#include "hpstl/smc/nested_path.hpp"
#include "hpstl/smc/nested_state.hpp"
#include "hpstl/smc/simple.hpp"
#include "hpstl/smc/types.hpp"

namespace hpstl::smc {

/// Classifies a closed state formula and runs the matching engine.
inline Verdict verify(const models::ModelPtr& model, const logic::FormulaPtr& f, const SmcConfig& cfg) {
    cfg.validate();
    switch (logic::classify(*f)) {
    case logic::AlgorithmKind::Simple:
        return verify_simple(model, *logic::match_simple(*f), cfg);
    case logic::AlgorithmKind::Joint:
        return verify_joint(model, logic::compile_region(*f, cfg.regions), cfg);
    case logic::AlgorithmKind::NestedState:
        return verify_nested_state(model, f, cfg);
    case logic::AlgorithmKind::NestedPath:
        return verify_nested_path(model, *logic::match_nested_path(*f), cfg);
    }
    throw UnsupportedShape("unclassified formula");
}

} // namespace hpstl::smc
