#include "json_io.hpp"

#include <charconv>

#include "leadscore/errors.hpp"

namespace leadscore::detail {

using nlohmann::json;

std::string fingerprint_to_hex(std::uint64_t fingerprint) {
  char buf[17] = {};
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[fingerprint & 0xf];
    fingerprint >>= 4;
  }
  return std::string(buf, 16);
}

std::uint64_t fingerprint_from_hex(const std::string& hex) {
  if (hex.size() != 16) throw ParseError("fingerprint must be 16 hex digits");
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
    throw ParseError("invalid fingerprint '" + hex + "'");
  }
  return value;
}

json vocab_to_json(const FeatureVocabulary& vocab) {
  json j;
  auto& unary = j["unary"] = json::array();
  for (const auto& [key, col] : vocab.unary) unary.push_back({key.first, key.second, col});
  auto& continuous = j["continuous"] = json::array();
  for (const auto& [attr, col] : vocab.continuous) {
    const auto& stats = vocab.standardization.at(attr);
    continuous.push_back({attr, col, stats.mean, stats.stddev});
  }
  auto& icat = j["interaction_categorical"] = json::array();
  for (const auto& [key, col] : vocab.interaction_categorical) {
    icat.push_back({key.first, key.second, col});
  }
  auto& icont = j["interaction_continuous"] = json::array();
  for (const auto& [attr, col] : vocab.interaction_continuous) icont.push_back({attr, col});
  j["known_categorical"] = vocab.known_categorical;
  j["known_continuous"] = vocab.known_continuous;
  j["total_columns"] = vocab.total_columns;
  j["fingerprint"] = fingerprint_to_hex(vocab.fingerprint);
  return j;
}

FeatureVocabulary vocab_from_json(const json& j) {
  FeatureVocabulary vocab;
  for (const auto& entry : j.at("unary")) {
    vocab.unary[{entry.at(0).get<std::string>(), entry.at(1).get<std::string>()}] =
        entry.at(2).get<std::size_t>();
  }
  for (const auto& entry : j.at("continuous")) {
    auto attr = entry.at(0).get<std::string>();
    vocab.continuous[attr] = entry.at(1).get<std::size_t>();
    vocab.standardization[attr] = {entry.at(2).get<double>(), entry.at(3).get<double>()};
  }
  for (const auto& entry : j.at("interaction_categorical")) {
    vocab.interaction_categorical[{entry.at(0).get<std::string>(),
                                   entry.at(1).get<std::string>()}] =
        entry.at(2).get<std::size_t>();
  }
  for (const auto& entry : j.at("interaction_continuous")) {
    vocab.interaction_continuous[entry.at(0).get<std::string>()] = entry.at(1).get<std::size_t>();
  }
  for (const auto& attr : j.at("known_categorical")) {
    vocab.known_categorical.insert(attr.get<std::string>());
  }
  for (const auto& attr : j.at("known_continuous")) {
    vocab.known_continuous.insert(attr.get<std::string>());
  }
  vocab.total_columns = j.at("total_columns").get<std::size_t>();
  vocab.fingerprint = fingerprint_from_hex(j.at("fingerprint").get<std::string>());
  return vocab;
}

}  // namespace leadscore::detail
