#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

// Fixed word lists used by the quiz linter and the feature extractor. All
// entries are lowercase.
namespace interact::lexicon {

using WordSet = std::unordered_set<std::string>;

const WordSet& stopwords();
// Subordinators and relativizers counted by the depth proxy.
const WordSet& subordinators();
const WordSet& hedges();
const WordSet& modals();
const WordSet& polite_words();
const WordSet& temporal_words();
const WordSet& be_forms();
const WordSet& irregular_participles();
// Words ending in -ed/-en that are not participles.
const WordSet& participle_exceptions();
const WordSet& third_person_pronouns();

// Multi-word cues, matched case-insensitively as substrings.
const std::vector<std::string>& example_phrases();
const std::vector<std::string>& meta_phrases();

}  // namespace interact::lexicon
