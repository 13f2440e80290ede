#pragma once

#include <utility>

#include "editseq/synth/rule.hpp"

namespace editseq::synth {

// (EPR, ACD) for a rule.
//
// EPR is the diff length between a generic instantiation of the pattern and
// the corresponding replacement, with every wildcard/meta position bound to
// a distinct character.
//
// ACD averages |replacement offset - pattern offset| over every occurrence
// of a capture-group character in the replacement, skipping occurrences
// that stay at displacement zero.
std::pair<double, double> rule_stats(const RuleSpec& rule, int vocab_size);

}  // namespace editseq::synth
