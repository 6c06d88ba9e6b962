#pragma once

// Independent brute-force judge used to cross-check the evaluator, written
// straight from the constraint semantics with naive text handling. It is
// only exact on "sanitized" text: ASCII, single-space word separation,
// sentences ending in . ! or ? followed by a capitalized word, paragraphs
// joined by exactly "\n\n", no abbreviations or quotes. The random-pair
// generator below only produces such text.

#include <cstdint>
#include <string>
#include <vector>

#include "collie/constraint.hpp"
#include "collie/rng.hpp"

namespace oracle {

bool eval_spec(const collie::ConstraintSpec& spec, const std::string& text);

struct RandomPair {
  collie::ConstraintSpec spec;
  std::string text;
};

/// Well-formed random spec (at most `max_atoms` base constraints) plus a
/// sanitized random text at the spec's generation level. The text is not
/// biased toward satisfaction; both outcomes occur.
RandomPair random_pair(collie::DeterministicRng& rng, int max_atoms = 4);

}  // namespace oracle
