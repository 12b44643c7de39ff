#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "exrew/fixpoint.hpp"
#include "exrew/pgcl/expectation.hpp"
#include "exrew/pgcl/opsem.hpp"

namespace exrew::pgcl {

// Demonic resolves nondeterministic choice by minimizing the preexpectation,
// angelic by maximizing.
enum class WpMode { Demonic, Angelic };

inline BellmanMode bellman_mode_of(WpMode mode) {
    return mode == WpMode::Demonic ? BellmanMode::Min : BellmanMode::Max;
}

// The weakest preexpectation of C with respect to postexpectation X, with
// every while loop replaced by its loop_budget-th unfolding from the zero
// expectation (nested loops consume the same budget). The result is a
// pointwise lower bound on the true least-fixed-point semantics,
// nondecreasing in loop_budget.
Expectation wp(const StmtPtr& program, const Expectation& post, WpMode mode,
               std::size_t loop_budget);

// One application of the loop's characteristic function to Y:
//   [guard] * wp(body, Y) + [!guard] * X
// `loop_budget` only affects loops nested inside the body.
Expectation char_fn_apply(const StmtPtr& loop, const Expectation& post, WpMode mode,
                          const Expectation& y, std::size_t loop_budget);

// Steps a straight-line run of the program takes to reach a terminated
// configuration, maximized over branches; one loop unfolding counts the body
// once. Used to convert loop budgets into operational step counts.
std::size_t syntactic_step_weight(const Stmt& s);

// The steps-th Kleene iterate of the min/max Bellman operator on the
// operational MDP with reward torew(post), at configuration (program, state):
// an exact lower bound on the operational weakest preexpectation,
// nondecreasing in steps. Passing a shared OperationalMdp reuses interning
// across calls.
ExtValue op_wp(const StmtPtr& program, const std::function<ExtValue(const ProgramState&)>& post,
               const ProgramState& state, WpMode mode, std::size_t steps,
               std::shared_ptr<OperationalMdp> mdp = nullptr,
               const KleeneOptions& opts = {});

ExtValue op_wp(const StmtPtr& program, const Expectation& post, const ProgramState& state,
               WpMode mode, std::size_t steps, std::shared_ptr<OperationalMdp> mdp = nullptr,
               const KleeneOptions& opts = {});

// --- cross-validation harness -------------------------------------------------

struct SchedulePoint {
    std::size_t wp_budget;
    std::size_t op_steps;
};

// Slot k maps to wp budget k and op steps k * syntactic_step_weight + 2, so
// both Kleene chains cover the same number of loop unfoldings per slot.
std::vector<SchedulePoint> default_schedule(const Stmt& program, std::size_t slots);

struct SoundnessPoint {
    SchedulePoint schedule;
    ExtValue wp_value;
    ExtValue op_value;
};

struct SoundnessStateReport {
    ProgramState state;
    std::vector<SoundnessPoint> points;
    bool wp_monotone = true;
    bool op_monotone = true;
    bool wp_stabilized = false;       // two consecutive equal wp values
    bool op_stabilized = false;
    bool agree_when_stabilized = false;  // both stabilized and final values equal
    ExtValue final_wp;
    ExtValue final_op;
    std::optional<ExtValue> final_gap;   // |wp - op| at the last slot, when both finite
};

struct SoundnessReport {
    std::vector<SoundnessStateReport> per_state;
};

// Emits both monotone sequences (wp budget sweep, op step sweep) per sampled
// state and flags monotonicity violations, exact agreement under
// stabilization, and the residual gap at budget exhaustion. Never asserts
// equality of unstabilized lower bounds.
SoundnessReport soundness_check(const StmtPtr& program, const Expectation& post,
                                const std::vector<ProgramState>& states, WpMode mode,
                                const std::vector<SchedulePoint>& schedule);

struct DecompositionReport {
    // op_wp(C1, op_wp(C2, X, ., n), ., m) <= op_wp(C1; C2, X, ., m+n)
    bool seq_inequality_holds = true;
    // wp agrees with its own one-step expansion through step(); checked
    // exactly, loop-free programs only
    bool one_step_identity_holds = true;
};

DecompositionReport decomposition_checks(const StmtPtr& c1, const StmtPtr& c2,
                                         const Expectation& post,
                                         const std::vector<ProgramState>& states, WpMode mode,
                                         std::size_t steps);

}  // namespace exrew::pgcl
