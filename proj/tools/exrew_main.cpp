// Command-line front end: loads models or programs, runs the fixed-point
// engine, and prints deterministic, machine-diffable reports.
//
// Exit codes: 0 success, 1 input error, 2 resource cap exceeded,
// 3 certificate rejected.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "exrew/builtin_models.hpp"
#include "exrew/model_format.hpp"
#include "exrew/reachability.hpp"
#include "exrew/pgcl/parser.hpp"
#include "exrew/pgcl/wp.hpp"

using namespace exrew;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitResource = 2;
constexpr int kExitCertificate = 3;

struct CliError : std::runtime_error {
    CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kExitInput, "cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

// Deterministic report accumulator. The body is byte-identical across runs
// with identical inputs; wall-clock goes into a trailing '#' comment that is
// explicitly outside the determinism contract.
class Report {
public:
    Report(bool as_json, bool float_values) : json_(as_json), float_values_(float_values) {}

    void field(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
    }
    void value_field(const std::string& key, const ExtValue& v) { field(key, render(v)); }

    std::string render(const ExtValue& v) const {
        if (!float_values_) return v.str();
        std::ostringstream out;
        out.precision(17);
        out << v.to_double();
        return out.str();
    }

    void print(std::ostream& out, double wallclock_ms) const {
        if (json_) {
            nlohmann::json doc = nlohmann::json::array();
            for (const auto& [k, v] : lines_) doc.push_back({{"key", k}, {"value", v}});
            out << doc.dump(2) << "\n";
        } else {
            for (const auto& [k, v] : lines_) out << k << (v.empty() ? "" : " " + v) << "\n";
        }
        out << "# wallclock-ms " << static_cast<long>(wallclock_ms) << "\n";
    }

private:
    bool json_;
    bool float_values_;
    std::vector<std::pair<std::string, std::string>> lines_;
};

struct ModelSelection {
    std::string file;
    std::string builtin;
    std::uint32_t columns = 0;  // 0 = unbounded
    std::string r = "1";
};

struct LoadedInput {
    std::shared_ptr<const Mdp> mdp;
    RewardFn reward;
    std::string description;
};

LoadedInput resolve_model(const ModelSelection& sel) {
    LoadedInput input;
    if (!sel.builtin.empty()) {
        std::optional<std::uint32_t> columns;
        if (sel.columns > 0) columns = sel.columns;
        if (sel.builtin == "running-example") {
            BuiltinModel m = ladder_model(ExtValue::parse(sel.r), columns);
            input.mdp = m.mdp;
            input.reward = m.reward;
        } else if (sel.builtin == "cashout-chain") {
            BuiltinModel m = cashout_chain_model(columns);
            input.mdp = m.mdp;
            input.reward = m.reward;
        } else {
            throw CliError(kExitInput, "unknown builtin model: " + sel.builtin +
                                           " (available: running-example, cashout-chain)");
        }
        std::ostringstream desc;
        desc << "builtin:" << sel.builtin;
        if (sel.columns > 0) desc << " columns=" << sel.columns;
        if (sel.builtin == "running-example") desc << " r=" << ExtValue::parse(sel.r).str();
        input.description = desc.str();
        return input;
    }
    if (sel.file.empty()) throw CliError(kExitInput, "either a model file or --builtin is required");
    std::string bytes = read_file(sel.file);
    std::istringstream stream(bytes);
    LoadedModel loaded = parse_model(stream);
    input.mdp = loaded.mdp;
    input.reward = loaded.rewards.as_fn();
    input.description = sel.file + " digest " + hex64(fnv1a(bytes));
    return input;
}

StateId resolve_state(const Mdp& mdp, const std::string& name) {
    auto s = mdp.find_state(name);
    if (!s) throw CliError(kExitInput, "unknown state: " + name);
    return *s;
}

const char* verdict_name(KleeneVerdict v) {
    return v == KleeneVerdict::ConvergedExact ? "converged-exact" : "lower-bound";
}

// Inexact fast path: plain double value iteration over the same region the
// exact engine would sweep. Only ever drives reports, never oracles.
std::vector<double> float_iterates(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                                   StateId start, std::size_t steps) {
    std::vector<StateId> region{start};
    std::unordered_map<StateId, std::size_t> index{{start, 0}};
    for (std::size_t i = 0; i < region.size(); ++i) {
        for (StateId succ : mdp.all_successors(region[i])) {
            if (!index.count(succ) && index.size() < 5'000'000) {
                index[succ] = region.size();
                region.push_back(succ);
            }
        }
        if (i > steps * region.size()) break;  // defensive; regions here are finite slices
    }
    std::vector<double> cur(region.size(), 0.0), next(region.size(), 0.0);
    std::vector<double> at_start;
    at_start.push_back(0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t i = 0; i < region.size(); ++i) {
            bool first = true;
            double best = 0;
            for (ActionId a : mdp.enabled_actions(region[i])) {
                double sum = 0;
                for (const auto& e : mdp.successors(region[i], a).entries()) {
                    auto it = index.find(e.target);
                    double v = it == index.end() ? 0.0 : cur[it->second];
                    sum += e.prob.get_d() * v;
                }
                if (first || (mode == BellmanMode::Min ? sum < best : sum > best)) best = sum;
                first = false;
            }
            next[i] = rew(region[i]).to_double() + best;
        }
        std::swap(cur, next);
        at_start.push_back(cur[0]);
    }
    return at_start;
}

void emit_iterates(Report& report, const KleeneResult& res, StateId s) {
    for (std::size_t k = 0; k < res.iterates.size(); ++k)
        report.field("iterate " + std::to_string(k), report.render(res.iterates[k].get(s)));
}

int run_solve_like(const std::string& command, const std::string& argv_echo,
                   const ModelSelection& sel, const std::vector<std::string>& states,
                   const std::string& mode_name, std::size_t steps, const std::string& threshold,
                   std::size_t cap, const std::string& certificate, const std::string& rewards_file,
                   const std::vector<std::string>& targets, std::size_t node_budget, bool as_json,
                   bool use_float) {
    auto t0 = std::chrono::steady_clock::now();
    Report report(as_json, use_float);
    report.field("report", command);
    report.field("args", argv_echo);

    LoadedInput input = resolve_model(sel);
    report.field("input", input.description);
    if (!rewards_file.empty()) {
        std::string bytes = read_file(rewards_file);
        report.field("rewards", rewards_file + " digest " + hex64(fnv1a(bytes)));
        std::istringstream stream(bytes);
        ValueFunction table = parse_value_function(stream, *input.mdp);
        input.reward = [table](StateId s) { return table.get(s); };
    }

    BellmanMode mode;
    if (mode_name == "min")
        mode = BellmanMode::Min;
    else if (mode_name == "max")
        mode = BellmanMode::Max;
    else
        throw CliError(kExitInput, "--mode must be min or max");
    report.field("mode", mode_name);

    std::shared_ptr<const Mdp> mdp = input.mdp;
    RewardFn reward = input.reward;
    if (command == "mdp-reach") {
        std::vector<StateId> target_ids;
        for (const auto& name : targets) target_ids.push_back(resolve_state(*mdp, name));
        ReachInstance inst = reach_transform(mdp, target_ids);
        mdp = inst.mdp;
        reward = inst.reward;
        std::ostringstream tl;
        for (std::size_t i = 0; i < targets.size(); ++i) tl << (i ? "," : "") << targets[i];
        report.field("targets", tl.str());
    }

    std::vector<StateId> query;
    for (const auto& name : states) query.push_back(resolve_state(*mdp, name));
    if (query.empty()) throw CliError(kExitInput, "at least one --state is required");

    int exit_code = kExitOk;
    std::size_t nodes = 0;

    KleeneOptions kleene_opts;
    kleene_opts.node_budget = node_budget;

    if (!threshold.empty()) {
        ExtValue bound = ExtValue::parse(threshold);
        report.field("threshold", bound.str());
        report.field("cap", std::to_string(cap));
        for (StateId s : query) {
            report.field("state", mdp->state_name(s));
            DivergenceVerdict v = divergence_probe(*mdp, reward, mode, s, bound, cap, kleene_opts);
            if (v.exceeded)
                report.field("verdict",
                             "exceeds-threshold(step " + std::to_string(v.at_step) + ")");
            else
                report.field("verdict", "below-threshold-at-cap");
            report.value_field("last-value", v.last_value);
        }
    } else {
        report.field("steps", std::to_string(steps));
        for (StateId s : query) {
            report.field("state", mdp->state_name(s));
            if (use_float) {
                std::vector<double> iterates = float_iterates(*mdp, reward, mode, s, steps);
                for (std::size_t k = 0; k < iterates.size(); ++k) {
                    std::ostringstream v;
                    v.precision(17);
                    v << iterates[k];
                    report.field("iterate " + std::to_string(k), v.str());
                }
                report.field("verdict", "float-approximation");
            } else {
                KleeneResult res = kleene_iterate(*mdp, reward, mode, {s}, steps, kleene_opts);
                nodes = std::max(nodes, res.explored_states);
                emit_iterates(report, res, s);
                std::string verdict = verdict_name(res.verdict);
                if (res.verdict == KleeneVerdict::ConvergedExact)
                    verdict += "(step " + std::to_string(res.stabilized_at) + ")";
                report.field("verdict", verdict);
            }
        }
    }

    if (!certificate.empty()) {
        std::string bytes = read_file(certificate);
        report.field("certificate", certificate + " digest " + hex64(fnv1a(bytes)));
        std::istringstream stream(bytes);
        ValueFunction candidate = parse_value_function(stream, *mdp);
        std::vector<StateId> domain;
        for (const auto& [s, _] : candidate.raw()) domain.push_back(s);
        std::sort(domain.begin(), domain.end());
        try {
            ParkResult res = park_check(*mdp, reward, mode, candidate, domain);
            if (res.certified) {
                report.field("certificate-verdict", "accepted");
                for (StateId s : query)
                    report.field("certified-upper-bound " + mdp->state_name(s),
                                 report.render(candidate.get(s)));
            } else {
                report.field("certificate-verdict",
                             "rejected(state " + mdp->state_name(*res.counterexample) + ")");
                exit_code = kExitCertificate;
            }
        } catch (const DomainNotSuccessorClosed& e) {
            report.field("certificate-verdict",
                         std::string("rejected(domain-not-successor-closed: ") + e.escaping + ")");
            exit_code = kExitCertificate;
        }
    }

    if (nodes > 0) report.field("nodes", std::to_string(nodes));
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    report.print(std::cout, ms);
    return exit_code;
}

pgcl::WpMode parse_wp_mode(const std::string& name) {
    if (name == "demonic") return pgcl::WpMode::Demonic;
    if (name == "angelic") return pgcl::WpMode::Angelic;
    throw CliError(kExitInput, "--mode must be demonic or angelic");
}

int run_pgcl(const std::string& argv_echo, const std::string& file, const std::string& post_text,
             const std::vector<std::string>& state_texts, const std::string& mode_name,
             std::size_t wp_budget, std::size_t op_steps, std::size_t slots, bool check_soundness,
             const std::vector<std::string>& simulate, const std::string& sim_policy,
             const std::string& threshold, std::size_t cap, bool as_json, bool use_float) {
    using namespace pgcl;
    auto t0 = std::chrono::steady_clock::now();
    Report report(as_json, use_float);
    report.field("report", "pgcl");
    report.field("args", argv_echo);

    std::string bytes = read_file(file);
    report.field("input", file + " digest " + hex64(fnv1a(bytes)));

    StmtPtr program;
    Expectation post;
    try {
        program = parse_program(bytes);
        post = parse_expectation(post_text);
    } catch (const ParseError& e) {
        throw CliError(kExitInput, std::string("parse error: ") + e.what());
    }
    report.field("post", post_text);
    WpMode mode = parse_wp_mode(mode_name);
    report.field("mode", mode_name);

    std::vector<ProgramState> sigmas;
    for (const auto& text : state_texts) sigmas.push_back(ProgramState::parse(text));
    if (sigmas.empty()) sigmas.push_back(ProgramState{});

    auto mdp = std::make_shared<OperationalMdp>();
    RewardFn rew = torew(mdp, post.as_function());

    for (const ProgramState& sigma : sigmas) {
        report.field("state", sigma.str().empty() ? "all-zero" : sigma.str());
        StateId start = mdp->intern(Configuration::running(program, sigma));

        report.field("wp-budget", std::to_string(wp_budget));
        for (std::size_t b = 0; b <= wp_budget; ++b)
            report.field("wp " + std::to_string(b),
                         report.render(wp(program, post, mode, b).eval(sigma)));

        if (!threshold.empty()) {
            ExtValue bound = ExtValue::parse(threshold);
            report.field("threshold", bound.str());
            report.field("cap", std::to_string(cap));
            DivergenceVerdict v = divergence_probe(*mdp, rew, bellman_mode_of(mode), start, bound,
                                                   cap);
            report.field("op-verdict", v.exceeded ? "exceeds-threshold(step " +
                                                        std::to_string(v.at_step) + ")"
                                                  : "below-threshold-at-cap");
        } else {
            report.field("op-steps", std::to_string(op_steps));
            KleeneOptions opts;
            opts.stop_on_stabilization = false;
            KleeneResult res =
                kleene_iterate(*mdp, rew, bellman_mode_of(mode), {start}, op_steps, opts);
            emit_iterates(report, res, start);
            report.field("op-verdict", verdict_name(res.verdict));
        }

        if (check_soundness) {
            auto schedule = default_schedule(*program, slots);
            SoundnessReport sr = soundness_check(program, post, {sigma}, mode, schedule);
            const auto& state_report = sr.per_state.front();
            report.field("soundness-slots", std::to_string(slots));
            report.field("soundness-step-weight", std::to_string(syntactic_step_weight(*program)));
            for (const auto& point : state_report.points) {
                report.field("soundness " + std::to_string(point.schedule.wp_budget) + "/" +
                                 std::to_string(point.schedule.op_steps),
                             report.render(point.wp_value) + " " + report.render(point.op_value));
            }
            report.field("soundness-monotone",
                         state_report.wp_monotone && state_report.op_monotone ? "yes" : "NO");
            if (state_report.agree_when_stabilized)
                report.field("soundness-agreement", "exact");
            else if (state_report.final_gap)
                report.field("soundness-gap", report.render(*state_report.final_gap));
            else
                report.field("soundness-gap", "undefined(infinite values)");
        }

        if (!simulate.empty()) {
            if (simulate.size() != 2) throw CliError(kExitInput, "--simulate wants TRIALS SEED");
            std::size_t trials = std::stoull(simulate[0]);
            std::uint64_t seed = std::stoull(simulate[1]);
            std::size_t horizon = std::max<std::size_t>(op_steps, 1);
            auto policy = [&](StateId s) -> ActionId {
                auto actions = mdp->enabled_actions(s);
                if (sim_policy == "right") return actions.back();
                return actions.front();  // "first" and "left" coincide here
            };
            MonteCarloEstimate est =
                monte_carlo_estimate(*mdp, rew, policy, start, horizon, trials, seed);
            std::ostringstream mean, stderr_text;
            mean.precision(17);
            stderr_text.precision(17);
            mean << est.mean;
            stderr_text << est.std_error;
            report.field("simulate", simulate[0] + " trials seed " + simulate[1] + " policy " +
                                         sim_policy + " horizon " + std::to_string(horizon));
            report.field("simulate-mean", mean.str());
            report.field("simulate-stderr", stderr_text.str());
            report.field("simulate-divergent", est.divergent ? "yes" : "no");
        }
    }

    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    report.print(std::cout, ms);
    return kExitOk;
}

int run_dump_fragment(const std::string& file, const std::string& state_text, std::size_t depth) {
    using namespace pgcl;
    std::string bytes = read_file(file);
    StmtPtr program;
    try {
        program = parse_program(bytes);
    } catch (const ParseError& e) {
        throw CliError(kExitInput, std::string("parse error: ") + e.what());
    }
    ProgramState sigma = ProgramState::parse(state_text);
    auto mdp = std::make_shared<OperationalMdp>();
    std::cout << dump_fragment(*mdp, Configuration::running(program, sigma), depth,
                               stmt_variables(*program));
    return kExitOk;
}

int run_emit_model(const ModelSelection& sel) {
    if (sel.builtin.empty() || sel.columns == 0)
        throw CliError(kExitInput, "emit-model wants --builtin NAME --columns K");
    LoadedInput input = resolve_model(sel);
    std::optional<StateId> start = input.mdp->find_state("s0");
    auto [mdp, rewards] = materialize(*input.mdp, input.reward, {*start});
    std::cout << emit_model(*mdp, rewards);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Total expected rewards of MDPs via least-fixed-point iteration, "
                 "with a pGCL front end"};
    app.require_subcommand(1);
    // --json/--float/--node-budget may appear after the subcommand name
    app.fallthrough();

    // shared flags
    bool as_json = false;
    bool use_float = false;
    app.add_flag("--json", as_json, "emit the report as JSON");
    app.add_flag("--float", use_float,
                 "report (and for iterate tables, compute) in machine floats");

    ModelSelection sel;
    std::vector<std::string> states, targets;
    std::string mode = "min";
    std::size_t steps = 50;
    std::string threshold;
    std::size_t cap = 500;
    std::string certificate;
    std::string rewards_file;
    std::size_t node_budget = 5'000'000;
    app.add_option("--node-budget", node_budget, "state exploration cap");

    auto add_model_options = [&](CLI::App* cmd) {
        cmd->add_option("model", sel.file, "explicit model file");
        cmd->add_option("--builtin", sel.builtin,
                        "builtin generator: running-example | cashout-chain");
        cmd->add_option("--columns", sel.columns, "truncate the builtin to this many columns");
        cmd->add_option("--r", sel.r, "reward constant of the running-example builtin");
    };

    CLI::App* solve = app.add_subcommand("mdp-solve", "iterate min/max expected total reward");
    add_model_options(solve);
    solve->add_option("--state", states, "query state (repeatable)");
    solve->add_option("--mode", mode, "min | max");
    solve->add_option("--steps", steps, "number of Kleene iterations");
    solve->add_option("--threshold", threshold, "run a divergence probe against this value");
    solve->add_option("--cap", cap, "iteration cap for the divergence probe");
    solve->add_option("--certificate", certificate, "value-function file to Park-check");
    solve->add_option("--rewards", rewards_file, "reward file overriding the model's rewards");

    CLI::App* reach = app.add_subcommand("mdp-reach", "reachability probabilities via rewards");
    add_model_options(reach);
    reach->add_option("--state", states, "query state (repeatable)");
    reach->add_option("--targets", targets, "target state names")->delimiter(',');
    reach->add_option("--mode", mode, "min | max");
    reach->add_option("--steps", steps, "number of Kleene iterations");
    reach->add_option("--certificate", certificate, "value-function file to Park-check");

    std::string program_file, post_text = "0", wp_mode = "demonic", sim_policy = "first";
    std::vector<std::string> state_texts, simulate;
    std::size_t wp_budget = 20, op_steps = 60, slots = 20;
    bool check_soundness = false;

    CLI::App* pgcl_cmd = app.add_subcommand("pgcl", "analyze a program");
    pgcl_cmd->add_option("program", program_file, "program file")->required();
    pgcl_cmd->add_option("--post", post_text, "postexpectation");
    pgcl_cmd->add_option("--state", state_texts, "initial state, e.g. \"x=0,y=0\" (repeatable)");
    pgcl_cmd->add_option("--mode", wp_mode, "demonic | angelic");
    pgcl_cmd->add_option("--wp-budget", wp_budget, "loop unfoldings for the wp table");
    pgcl_cmd->add_option("--op-steps", op_steps, "Kleene iterations on the operational MDP");
    pgcl_cmd->add_option("--slots", slots, "schedule slots for --check-soundness");
    pgcl_cmd->add_flag("--check-soundness", check_soundness,
                       "sweep wp and operational chains side by side");
    pgcl_cmd->add_option("--simulate", simulate, "TRIALS SEED")->expected(2);
    pgcl_cmd->add_option("--sim-policy", sim_policy, "first | left | right");
    pgcl_cmd->add_option("--threshold", threshold, "divergence probe threshold (op side)");
    pgcl_cmd->add_option("--cap", cap, "iteration cap for the divergence probe");

    std::string frag_state;
    std::size_t frag_depth = 6;
    CLI::App* frag = app.add_subcommand("dump-fragment", "dump the reachable configuration graph");
    frag->add_option("program", program_file, "program file")->required();
    frag->add_option("--state", frag_state, "initial state");
    frag->add_option("--depth", frag_depth, "exploration depth");

    CLI::App* emit = app.add_subcommand("emit-model", "write a builtin truncation as a model file");
    add_model_options(emit);

    std::ostringstream argv_echo;
    for (int i = 1; i < argc; ++i) argv_echo << (i > 1 ? " " : "") << argv[i];

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? kExitOk : kExitInput;
        }
        if (solve->parsed())
            return run_solve_like("mdp-solve", argv_echo.str(), sel, states, mode, steps,
                                  threshold, cap, certificate, rewards_file, {}, node_budget,
                                  as_json, use_float);
        if (reach->parsed())
            return run_solve_like("mdp-reach", argv_echo.str(), sel, states, mode, steps,
                                  threshold, cap, certificate, rewards_file, targets, node_budget,
                                  as_json, use_float);
        if (pgcl_cmd->parsed())
            return run_pgcl(argv_echo.str(), program_file, post_text, state_texts, wp_mode,
                            wp_budget, op_steps, slots, check_soundness, simulate, sim_policy,
                            threshold, cap, as_json, use_float);
        if (frag->parsed()) return run_dump_fragment(program_file, frag_state, frag_depth);
        if (emit->parsed()) return run_emit_model(sel);
        return kExitInput;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const ModelParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ResourceCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const EnumerationBoundExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
