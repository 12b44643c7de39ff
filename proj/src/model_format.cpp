#include "exrew/model_format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace exrew {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

Rational parse_prob(const Line& line, const std::string& tok) {
    Rational p;
    try {
        p = parse_rational(tok);
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(line.number, e.what());
    }
    if (p < 0 || p > 1)
        throw ModelParseError(line.number, "probability " + tok + " outside [0, 1]");
    return p;
}

ExtValue parse_reward(const Line& line, const std::string& tok) {
    try {
        return ExtValue::parse(tok);
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(line.number, e.what());
    }
}

}  // namespace

LoadedModel parse_model(std::istream& in) {
    std::vector<Line> lines = tokenize(in);

    enum class Section { None, States, Actions, Transitions, Rewards };
    Section section = Section::None;

    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    struct Edge {
        std::size_t line;
        std::string from, action, to;
        Rational prob;
    };
    std::vector<Edge> edges;
    std::vector<std::tuple<std::size_t, std::string, ExtValue>> reward_rows;

    for (const Line& line : lines) {
        const std::string& head = line.tokens.front();
        if (head == "states" || head == "actions" || head == "transitions" || head == "rewards") {
            if (line.tokens.size() != 1)
                throw ModelParseError(line.number, "section keyword '" + head +
                                                       "' must stand on its own line");
            section = head == "states"        ? Section::States
                      : head == "actions"     ? Section::Actions
                      : head == "transitions" ? Section::Transitions
                                              : Section::Rewards;
            continue;
        }
        switch (section) {
            case Section::None:
                throw ModelParseError(line.number, "expected a section keyword before '" + head + "'");
            case Section::States:
                for (const auto& t : line.tokens) state_names.push_back(t);
                break;
            case Section::Actions:
                for (const auto& t : line.tokens) action_names.push_back(t);
                break;
            case Section::Transitions: {
                if (line.tokens.size() != 4)
                    throw ModelParseError(line.number,
                                          "transition records are 'state action prob state'");
                edges.push_back({line.number, line.tokens[0], line.tokens[1], line.tokens[3],
                                 parse_prob(line, line.tokens[2])});
                break;
            }
            case Section::Rewards: {
                if (line.tokens.size() != 2)
                    throw ModelParseError(line.number, "reward records are 'state value'");
                reward_rows.emplace_back(line.number, line.tokens[0],
                                         parse_reward(line, line.tokens[1]));
                break;
            }
        }
    }

    if (state_names.empty()) throw ModelParseError(lines.empty() ? 0 : lines.back().number,
                                                   "model declares no states");
    if (action_names.empty()) throw ModelParseError(lines.empty() ? 0 : lines.back().number,
                                                    "model declares no actions");

    LoadedModel out;
    try {
        out.mdp = std::make_shared<ExplicitMdp>(state_names, action_names);
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(0, e.what());
    }

    // Group transition rows into per-(state, action) distributions.
    std::map<std::pair<StateId, ActionId>, std::vector<Transition>> grouped;
    for (const Edge& e : edges) {
        auto from = out.mdp->find_state(e.from);
        if (!from) throw ModelParseError(e.line, "undeclared state: " + e.from);
        auto to = out.mdp->find_state(e.to);
        if (!to) throw ModelParseError(e.line, "undeclared state: " + e.to);
        ActionId action;
        try {
            action = out.mdp->action(e.action);
        } catch (const std::invalid_argument&) {
            throw ModelParseError(e.line, "undeclared action: " + e.action);
        }
        grouped[{*from, action}].push_back({*to, e.prob});
    }
    for (auto& [key, entries] : grouped) {
        try {
            out.mdp->set_transitions(key.first, key.second, Distribution::make(std::move(entries)));
        } catch (const std::invalid_argument& e) {
            throw ModelParseError(0, std::string(e.what()) + " for state " +
                                         out.mdp->state_name(key.first) + ", action " +
                                         out.mdp->action_name(key.second));
        }
    }
    try {
        out.mdp->validate();
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(0, e.what());
    }

    for (const auto& [line, name, value] : reward_rows) {
        auto s = out.mdp->find_state(name);
        if (!s) throw ModelParseError(line, "undeclared state: " + name);
        out.rewards.set(*s, value);
    }
    return out;
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    return parse_model(in);
}

std::string emit_model(const ExplicitMdp& mdp, const RewardMap& rewards) {
    std::ostringstream out;
    out << "states\n";
    for (StateId s = 0; s < mdp.state_count(); ++s) out << "  " << mdp.state_name(s) << "\n";
    out << "actions\n";
    for (ActionId a = 0; a < mdp.action_count(); ++a) out << "  " << mdp.action_name(a) << "\n";
    out << "transitions\n";
    for (StateId s = 0; s < mdp.state_count(); ++s) {
        for (ActionId a : mdp.enabled_actions(s)) {
            for (const auto& e : mdp.successors(s, a).entries()) {
                out << "  " << mdp.state_name(s) << " " << mdp.action_name(a) << " "
                    << rational_str(e.prob) << " " << mdp.state_name(e.target) << "\n";
            }
        }
    }
    out << "rewards\n";
    for (StateId s = 0; s < mdp.state_count(); ++s) {
        ExtValue v = rewards.get(s);
        if (!v.is_zero()) out << "  " << mdp.state_name(s) << " " << v.str() << "\n";
    }
    return out.str();
}

ValueFunction parse_value_function(std::istream& in, const Mdp& mdp) {
    ValueFunction v;
    for (const Line& line : tokenize(in)) {
        if (line.tokens.size() != 2)
            throw ModelParseError(line.number, "value records are 'state value'");
        auto s = mdp.find_state(line.tokens[0]);
        if (!s) throw ModelParseError(line.number, "unknown state: " + line.tokens[0]);
        v.set(*s, parse_reward(line, line.tokens[1]));
    }
    return v;
}

ValueFunction load_value_function_file(const std::string& path, const Mdp& mdp) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open value-function file: " + path);
    return parse_value_function(in, mdp);
}

std::string emit_value_function(const ValueFunction& v, const Mdp& mdp,
                                const std::vector<StateId>& domain) {
    std::vector<StateId> ordered = domain;
    std::sort(ordered.begin(), ordered.end());
    std::ostringstream out;
    for (StateId s : ordered) out << mdp.state_name(s) << " " << v.get(s).str() << "\n";
    return out.str();
}

}  // namespace exrew
