#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace privpref {

// A user's disposition for a data-access request. Fixed class order
// Allow < Deny < Ask is used everywhere an ordering or tie-break is needed;
// the numeric wire codes are 1 / 0 / -1.
enum class PrivacyChoice { Allow = 0, Deny = 1, Ask = 2 };

inline constexpr std::array<PrivacyChoice, 3> kChoiceOrder = {
    PrivacyChoice::Allow, PrivacyChoice::Deny, PrivacyChoice::Ask};

inline constexpr size_t kNumChoices = 3;

int choice_code(PrivacyChoice c);
PrivacyChoice choice_from_code(int code);  // throws UnknownChoiceError

std::string_view choice_token(PrivacyChoice c);
PrivacyChoice choice_from_token(std::string_view token);  // strict match

constexpr size_t choice_index(PrivacyChoice c) { return static_cast<size_t>(c); }
PrivacyChoice choice_from_index(size_t i);  // throws UnknownChoiceError

// Trim surrounding whitespace, then title-case ("aLLow " -> "Allow").
std::string canonical_choice_token(std::string_view raw);

// Strict token -> code mapping; no canonicalization applied.
int encode_choice(std::string_view token);
std::string decode_choice(int code);

}  // namespace privpref
