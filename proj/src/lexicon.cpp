#include "interact/lexicon.hpp"

namespace interact::lexicon {

const WordSet& stopwords() {
  static const WordSet kWords = {
      "a",       "about",   "above",  "after",  "again",   "against", "all",    "also",
      "am",      "an",      "and",    "any",    "are",     "as",      "at",     "be",
      "because", "been",    "before", "being",  "below",   "between", "both",   "but",
      "by",      "can",     "could",  "did",    "do",      "does",    "doing",  "down",
      "during",  "each",    "few",    "for",    "from",    "further", "had",    "has",
      "have",    "having",  "he",     "her",    "here",    "hers",    "herself", "him",
      "himself", "his",     "how",    "i",      "if",      "in",      "into",   "is",
      "it",      "its",     "itself", "just",   "me",      "more",    "most",   "my",
      "myself",  "no",      "nor",    "not",    "now",     "of",      "off",    "on",
      "once",    "only",    "or",     "other",  "our",     "ours",    "out",    "over",
      "own",     "same",    "she",    "should", "so",      "some",    "such",   "than",
      "that",    "the",     "their",  "theirs", "them",    "then",    "there",  "these",
      "they",    "this",    "those",  "through", "to",     "too",     "under",  "until",
      "up",      "very",    "was",    "we",     "were",    "what",    "when",   "where",
      "which",   "while",   "who",    "whom",   "whose",   "why",     "will",   "with",
      "would",   "you",     "your",   "yours",  "yourself", "may",    "might",  "must",
      "shall",   "there's", "it's",   "don't",  "does",    "into",    "onto",   "upon",
  };
  return kWords;
}

const WordSet& subordinators() {
  static const WordSet kWords = {"because", "although", "though", "while", "since", "that",
                                 "which",   "who",      "whom",   "whose", "when",  "where",
                                 "if",      "unless",   "after",  "before", "as"};
  return kWords;
}

const WordSet& hedges() {
  static const WordSet kWords = {"maybe",  "perhaps",  "possibly", "could",  "might",
                                 "would",  "probably", "somewhat", "please", "kindly",
                                 "wonder", "guess",    "seems",    "likely"};
  return kWords;
}

const WordSet& modals() {
  static const WordSet kWords = {"can",     "could",    "may",      "might",  "must",
                                 "shall",   "should",   "will",     "would",  "perhaps",
                                 "possibly", "probably", "likely",  "maybe",  "uncertain"};
  return kWords;
}

const WordSet& polite_words() {
  static const WordSet kWords = {"please",  "thank",  "thanks", "appreciate", "appreciated",
                                 "welcome", "sorry",  "kindly", "glad",       "grateful"};
  return kWords;
}

const WordSet& temporal_words() {
  static const WordSet kWords = {
      "before",   "after",     "then",      "later",      "earlier",  "first",
      "finally",  "during",    "since",     "until",      "ago",      "recently",
      "previously", "subsequently", "meanwhile", "eventually", "initially", "afterwards",
      "year",     "years",     "month",     "months",     "today",    "yesterday",
      "tomorrow", "when",      "while",     "once",       "next",     "last"};
  return kWords;
}

const WordSet& be_forms() {
  static const WordSet kWords = {"am", "is", "are", "was", "were", "be", "been", "being"};
  return kWords;
}

const WordSet& irregular_participles() {
  static const WordSet kWords = {
      "made",  "done",   "seen",   "known", "given",  "taken",  "written", "built",
      "sent",  "held",   "found",  "told",  "brought", "thought", "paid",  "put",
      "set",   "kept",   "left",   "led",   "read",   "sung",   "begun",   "shown",
      "sold",  "bought", "caught", "taught", "won",   "lost",   "hit",     "cut",
      "drawn", "driven", "eaten",  "fallen", "forgotten", "hidden", "spoken", "stolen",
      "worn",  "born",   "torn",   "chosen", "frozen", "broken", "hung",   "struck"};
  return kWords;
}

const WordSet& participle_exceptions() {
  static const WordSet kWords = {"even",   "often",  "then",    "when",    "seven",  "eleven",
                                 "open",   "ten",    "men",     "women",   "children", "garden",
                                 "between", "need",   "red",     "bed",    "indeed",
                                 "speed",  "seed",   "feed",    "hundred", "shed",   "wed",
                                 "often",  "token",  "listen",  "kitchen", "chicken", "heaven",
                                 "golden", "sudden", "citizen", "screen",  "green",  "queen",
                                 "teen",   "again",  "been"};
  return kWords;
}

const WordSet& third_person_pronouns() {
  static const WordSet kWords = {"he",  "him",   "his",    "himself", "she",  "her",
                                 "hers", "herself", "it",  "its",     "itself", "they",
                                 "them", "their", "theirs", "themselves"};
  return kWords;
}

const std::vector<std::string>& example_phrases() {
  static const std::vector<std::string> kPhrases = {"for example", "for instance", "such as",
                                                    "e.g.", "to illustrate", "like when"};
  return kPhrases;
}

const std::vector<std::string>& meta_phrases() {
  static const std::vector<std::string> kPhrases = {
      "as mentioned", "as i mentioned", "as discussed", "as noted",   "as stated",
      "as i said",    "you mentioned",  "you asked",    "as explained", "mentioned earlier",
      "mentioned before", "earlier question", "previous question", "previous answer"};
  return kPhrases;
}

}  // namespace interact::lexicon
