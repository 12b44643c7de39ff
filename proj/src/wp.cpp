#include "exrew/pgcl/wp.hpp"

#include <algorithm>

namespace exrew::pgcl {

Expectation wp(const StmtPtr& program, const Expectation& post, WpMode mode,
               std::size_t loop_budget) {
    const Stmt& s = *program;
    switch (s.kind) {
        case Stmt::Kind::Skip:
            return post;
        case Stmt::Kind::Assign:
            return Expectation::substitute(post, s.var, s.expr);
        case Stmt::Kind::Tick:
            return Expectation::sum(Expectation::constant(s.reward), post);
        case Stmt::Kind::Seq:
            return wp(s.a, wp(s.b, post, mode, loop_budget), mode, loop_budget);
        case Stmt::Kind::Nondet: {
            Expectation left = wp(s.a, post, mode, loop_budget);
            Expectation right = wp(s.b, post, mode, loop_budget);
            return mode == WpMode::Demonic ? Expectation::min_of(left, right)
                                           : Expectation::max_of(left, right);
        }
        case Stmt::Kind::Prob: {
            Expectation left = wp(s.a, post, mode, loop_budget);
            Expectation right = wp(s.b, post, mode, loop_budget);
            return Expectation::sum(
                Expectation::product(Expectation::constant(ExtValue(s.prob)), left),
                Expectation::product(Expectation::constant(ExtValue(Rational(1 - s.prob))), right));
        }
        case Stmt::Kind::If: {
            Expectation left = wp(s.a, post, mode, loop_budget);
            Expectation right = wp(s.b, post, mode, loop_budget);
            return Expectation::sum(
                Expectation::product(Expectation::iverson(s.guard), left),
                Expectation::product(Expectation::iverson(BExpr::bnot(s.guard)), right));
        }
        case Stmt::Kind::While: {
            // loop_budget-fold unfolding of the characteristic function from 0
            Expectation approx = Expectation::constant(ExtValue::zero());
            for (std::size_t i = 0; i < loop_budget; ++i)
                approx = char_fn_apply(program, post, mode, approx, loop_budget);
            return approx;
        }
    }
    throw std::logic_error("unreachable");
}

Expectation char_fn_apply(const StmtPtr& loop, const Expectation& post, WpMode mode,
                          const Expectation& y, std::size_t loop_budget) {
    if (loop->kind != Stmt::Kind::While)
        throw std::invalid_argument("characteristic functions are defined for loops");
    return Expectation::sum(
        Expectation::product(Expectation::iverson(loop->guard),
                             wp(loop->a, y, mode, loop_budget)),
        Expectation::product(Expectation::iverson(BExpr::bnot(loop->guard)), post));
}

std::size_t syntactic_step_weight(const Stmt& s) {
    switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Tick:
        case Stmt::Kind::Assign:
            return 1;
        case Stmt::Kind::Seq:
            return syntactic_step_weight(*s.a) + syntactic_step_weight(*s.b);
        case Stmt::Kind::Prob:
        case Stmt::Kind::Nondet:
        case Stmt::Kind::If:
            return 1 + std::max(syntactic_step_weight(*s.a), syntactic_step_weight(*s.b));
        case Stmt::Kind::While:
            return 1 + syntactic_step_weight(*s.a);
    }
    throw std::logic_error("unreachable");
}

ExtValue op_wp(const StmtPtr& program, const std::function<ExtValue(const ProgramState&)>& post,
               const ProgramState& state, WpMode mode, std::size_t steps,
               std::shared_ptr<OperationalMdp> mdp, const KleeneOptions& opts) {
    if (!mdp) mdp = std::make_shared<OperationalMdp>();
    StateId start = mdp->intern(Configuration::running(program, state));
    RewardFn rew = torew(mdp, post);
    KleeneOptions run = opts;
    // Stabilization on the query set alone does not witness a global fixed
    // point, and the contract here is the exact steps-th iterate.
    run.stop_on_stabilization = false;
    KleeneResult res = kleene_iterate(*mdp, rew, bellman_mode_of(mode), {start}, steps, run);
    return res.iterates.at(steps).get(start);
}

ExtValue op_wp(const StmtPtr& program, const Expectation& post, const ProgramState& state,
               WpMode mode, std::size_t steps, std::shared_ptr<OperationalMdp> mdp,
               const KleeneOptions& opts) {
    return op_wp(program, post.as_function(), state, mode, steps, std::move(mdp), opts);
}

std::vector<SchedulePoint> default_schedule(const Stmt& program, std::size_t slots) {
    std::size_t weight = syntactic_step_weight(program);
    std::vector<SchedulePoint> schedule;
    schedule.reserve(slots + 1);
    schedule.push_back({0, 0});
    for (std::size_t k = 1; k <= slots; ++k) schedule.push_back({k, k * weight + 2});
    return schedule;
}

SoundnessReport soundness_check(const StmtPtr& program, const Expectation& post,
                                const std::vector<ProgramState>& states, WpMode mode,
                                const std::vector<SchedulePoint>& schedule) {
    SoundnessReport report;
    if (schedule.empty()) return report;

    auto mdp = std::make_shared<OperationalMdp>();
    RewardFn rew = torew(mdp, post.as_function());
    std::size_t max_steps = 0;
    for (const auto& p : schedule) max_steps = std::max(max_steps, p.op_steps);

    for (const ProgramState& sigma : states) {
        SoundnessStateReport sr;
        sr.state = sigma;

        // One full Kleene run gives every op iterate at once; entry k of the
        // sequence is exact at the start state for every k.
        StateId start = mdp->intern(Configuration::running(program, sigma));
        KleeneOptions opts;
        opts.stop_on_stabilization = false;
        KleeneResult ops = kleene_iterate(*mdp, rew, bellman_mode_of(mode), {start}, max_steps, opts);

        for (const SchedulePoint& point : schedule) {
            SoundnessPoint sp;
            sp.schedule = point;
            sp.wp_value = wp(program, post, mode, point.wp_budget).eval(sigma);
            sp.op_value = ops.iterates.at(point.op_steps).get(start);
            sr.points.push_back(std::move(sp));
        }

        for (std::size_t i = 1; i < sr.points.size(); ++i) {
            if (sr.points[i].wp_value < sr.points[i - 1].wp_value) sr.wp_monotone = false;
            if (sr.points[i].op_value < sr.points[i - 1].op_value) sr.op_monotone = false;
        }
        if (sr.points.size() >= 2) {
            const auto& last = sr.points[sr.points.size() - 1];
            const auto& prev = sr.points[sr.points.size() - 2];
            sr.wp_stabilized = last.wp_value == prev.wp_value;
            sr.op_stabilized = last.op_value == prev.op_value;
        }
        sr.final_wp = sr.points.back().wp_value;
        sr.final_op = sr.points.back().op_value;
        sr.agree_when_stabilized =
            sr.wp_stabilized && sr.op_stabilized && sr.final_wp == sr.final_op;
        if (!sr.final_wp.is_infinite() && !sr.final_op.is_infinite()) {
            Rational gap = sr.final_wp.finite_value() - sr.final_op.finite_value();
            if (gap < 0) gap = -gap;
            sr.final_gap = ExtValue(gap);
        }
        report.per_state.push_back(std::move(sr));
    }
    return report;
}

DecompositionReport decomposition_checks(const StmtPtr& c1, const StmtPtr& c2,
                                         const Expectation& post,
                                         const std::vector<ProgramState>& states, WpMode mode,
                                         std::size_t steps) {
    DecompositionReport report;
    auto mdp = std::make_shared<OperationalMdp>();

    // (a) nesting a step-bounded inner run never beats running the
    // composition with the combined budget
    auto inner = [&](const ProgramState& tau) { return op_wp(c2, post, tau, mode, steps, mdp); };
    StmtPtr seq = Stmt::seq(c1, c2);
    for (const ProgramState& sigma : states) {
        ExtValue nested = op_wp(c1, inner, sigma, mode, steps, mdp);
        ExtValue joint = op_wp(seq, post, sigma, mode, 2 * steps, mdp);
        if (!(nested <= joint)) report.seq_inequality_holds = false;
    }

    // (b) wp agrees with one step() expansion, exactly; meaningful for
    // loop-free programs where wp needs no budget
    auto one_step = [&](const StmtPtr& c, const ProgramState& sigma) {
        Configuration conf = Configuration::running(c, sigma);
        ExtValue head_reward = rew_pgcl(conf);
        bool first = true;
        ExtValue best;
        for (const ConfigStep& st : step(conf)) {
            ExtValue sum;
            for (const auto& [succ, p] : st.outcomes) {
                ExtValue cont = succ.kind == Configuration::Kind::Terminated
                                    ? post.eval(succ.state)
                                    : wp(succ.program, post, mode, 0).eval(succ.state);
                sum += ExtValue(p) * cont;
            }
            if (first || (mode == WpMode::Demonic ? sum < best : sum > best)) best = sum;
            first = false;
        }
        return head_reward + best;
    };
    for (const ProgramState& sigma : states) {
        for (const StmtPtr& c : {c1, c2}) {
            ExtValue direct = wp(c, post, mode, 0).eval(sigma);
            if (direct != one_step(c, sigma)) report.one_step_identity_holds = false;
        }
    }
    return report;
}

}  // namespace exrew::pgcl
