#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace exrec {

// NFC-normalizes, lowercases (simple per-code-point mapping), then splits
// on whitespace runs. Text without any whitespace splits into single
// code points instead, so unsegmented scripts still yield a token stream.
// Invalid UTF-8 bytes are replaced with U+FFFD.
std::vector<std::string> tokenize(std::string_view text);

// FNV-1a 64-bit; the portable token hash behind the builtin embedder.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace exrec
