#pragma once

#include <set>
#include <string>
#include <vector>

#include "mgfusion/granularity/alignment.hpp"

namespace mgf {

// ARPABET vowel symbols without stress digits.
const std::set<std::string>& arpabet_vowels();

// Phone label with trailing stress digits removed ("AH0" -> "AH").
std::string strip_stress(const std::string& phone);

// Groups one word's phones into syllables: one vowel nucleus per syllable,
// consonants between nuclei go to the following nucleus, leading consonants
// to the first and trailing ones to the last. A vowel-free run becomes a
// single syllable. Syllables tile the span from the first phone's start to
// the last phone's end.
std::vector<Segment> syllabify(const std::vector<Segment>& phones,
                               const std::set<std::string>& vowels = arpabet_vowels());

// Applies syllabify() word by word; phones outside any word are grouped into
// maximal runs and treated as words of their own.
std::vector<Segment> syllabify_tiers(const AlignmentTiers& tiers,
                                     const std::set<std::string>& vowels = arpabet_vowels());

}  // namespace mgf
