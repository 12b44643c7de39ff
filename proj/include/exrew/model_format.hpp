#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "exrew/fixpoint.hpp"
#include "exrew/mdp.hpp"

namespace exrew {

// Raised on malformed model or value-function files; carries the 1-based line.
class ModelParseError : public std::runtime_error {
public:
    ModelParseError(std::size_t line, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line) + ": " + reason), line(line) {}
    std::size_t line;
};

struct LoadedModel {
    std::shared_ptr<ExplicitMdp> mdp;
    RewardMap rewards;
};

// Text format with four sections, each introduced by a keyword line:
//
//   states
//     s0 s1 bot
//   actions
//     N L R
//   transitions
//     s0 L 1 s1           # state action prob state, prob a rational
//     s0 R 1/2 bot
//     s0 R 1/2 s1
//   rewards
//     s1 3/2              # state value, value a rational or inf
//
// '#' starts a comment; tokens are whitespace-separated. Repeated
// (state, action) lines accumulate into one distribution, which must sum to
// exactly 1. Omitted rewards default to 0.
LoadedModel parse_model(std::istream& in);
LoadedModel load_model_file(const std::string& path);

std::string emit_model(const ExplicitMdp& mdp, const RewardMap& rewards);

// Value-function files: one "state value" pair per line, same lexical rules.
ValueFunction parse_value_function(std::istream& in, const Mdp& mdp);
ValueFunction load_value_function_file(const std::string& path, const Mdp& mdp);
std::string emit_value_function(const ValueFunction& v, const Mdp& mdp,
                                const std::vector<StateId>& domain);

}  // namespace exrew
