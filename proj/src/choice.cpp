#include "privpref/choice.hpp"

#include <cctype>

#include "privpref/errors.hpp"

namespace privpref {

int choice_code(PrivacyChoice c) {
  switch (c) {
    case PrivacyChoice::Allow: return 1;
    case PrivacyChoice::Deny: return 0;
    case PrivacyChoice::Ask: return -1;
  }
  throw InternalError("invalid PrivacyChoice value");
}

PrivacyChoice choice_from_code(int code) {
  switch (code) {
    case 1: return PrivacyChoice::Allow;
    case 0: return PrivacyChoice::Deny;
    case -1: return PrivacyChoice::Ask;
  }
  throw UnknownChoiceError("no privacy choice has code " + std::to_string(code));
}

std::string_view choice_token(PrivacyChoice c) {
  switch (c) {
    case PrivacyChoice::Allow: return "Allow";
    case PrivacyChoice::Deny: return "Deny";
    case PrivacyChoice::Ask: return "Ask";
  }
  throw InternalError("invalid PrivacyChoice value");
}

PrivacyChoice choice_from_token(std::string_view token) {
  if (token == "Allow") return PrivacyChoice::Allow;
  if (token == "Deny") return PrivacyChoice::Deny;
  if (token == "Ask") return PrivacyChoice::Ask;
  throw UnknownChoiceError("unknown privacy choice token \"" +
                           std::string(token) + "\"");
}

PrivacyChoice choice_from_index(size_t i) {
  if (i >= kNumChoices)
    throw UnknownChoiceError("choice index out of range: " + std::to_string(i));
  return static_cast<PrivacyChoice>(i);
}

std::string canonical_choice_token(std::string_view raw) {
  size_t b = 0;
  size_t e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (size_t i = 0; i < out.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(out[i]);
    out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
  }
  return out;
}

int encode_choice(std::string_view token) {
  return choice_code(choice_from_token(token));
}

std::string decode_choice(int code) {
  return std::string(choice_token(choice_from_code(code)));
}

}  // namespace privpref
