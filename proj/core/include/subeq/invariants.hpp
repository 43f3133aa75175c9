#pragma once

#include "subeq/subequation.hpp"

namespace subeq {

struct InvariantResult {
    std::string name;
    bool pass = false;
    bool gating = true;   // diagnostics-only checks do not gate
    double worst = 0.0;   // worst slack observed (sign convention per check)
    std::string note;
};

/// Sampled per-entry invariants: (P) and (N) margin monotonicity, duality
/// coherence on generic jets, cone scaling, double-dual identity, the
/// 2-eps-I strict-approximation shift for pure-eigenvalue entries, and the
/// (diagnostics-only) topological probe.
std::vector<InvariantResult> subequation_invariant_suite(const Subequation& f, int samples,
                                                         std::uint64_t seed);

bool all_pass(const std::vector<InvariantResult>& results);

}  // namespace subeq
