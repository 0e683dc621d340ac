#pragma once

// Internal JSON helpers shared by the model and generator serializers; not
// part of the installed API.

#include <string>

#include "json.hpp"
#include "leadscore/features.hpp"

namespace leadscore::detail {

nlohmann::json vocab_to_json(const FeatureVocabulary& vocab);

// Rebuilds the vocabulary with the *stored* fingerprint; callers compare it
// against FeatureVocabulary::compute_fingerprint to detect tampering.
FeatureVocabulary vocab_from_json(const nlohmann::json& j);

std::string fingerprint_to_hex(std::uint64_t fingerprint);
std::uint64_t fingerprint_from_hex(const std::string& hex);

}  // namespace leadscore::detail
