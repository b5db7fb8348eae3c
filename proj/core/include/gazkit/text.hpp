#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gazkit {

struct NormalizerOptions {
  bool case_fold = true;
};

// NFC-normalizes a UTF-8 token and, when case folding is on, lowercases it.
// Invalid UTF-8 is passed through unchanged.
std::string normalize_token(std::string_view token, const NormalizerOptions& options = {});

std::vector<std::string> normalize_tokens(const std::vector<std::string>& tokens,
                                          const NormalizerOptions& options = {});

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

std::string join(const std::vector<std::string>& pieces, std::string_view separator);

}  // namespace gazkit
