#include "exrec/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>

#include <stdexcept>

namespace exrec {

namespace {

void append_utf8(uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::u16string to_utf16(std::string_view text) {
  std::u16string out(text.size() + 1, u'\0');
  UErrorCode status = U_ZERO_ERROR;
  int32_t length = 0;
  u_strFromUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &length,
                       text.data(), static_cast<int32_t>(text.size()), 0xFFFD,
                       nullptr, &status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("UTF-8 conversion failed");
  }
  out.resize(static_cast<size_t>(length));
  return out;
}

std::u16string nfc(const std::u16string& text) {
  UErrorCode status = U_ZERO_ERROR;
  const UNormalizer2* normalizer = unorm2_getNFCInstance(&status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalizer unavailable");
  }
  std::u16string out(text.size() + 16, u'\0');
  int32_t length = unorm2_normalize(normalizer, text.data(),
                                    static_cast<int32_t>(text.size()),
                                    out.data(), static_cast<int32_t>(out.size()),
                                    &status);
  if (status == U_BUFFER_OVERFLOW_ERROR) {
    status = U_ZERO_ERROR;
    out.assign(static_cast<size_t>(length), u'\0');
    length = unorm2_normalize(normalizer, text.data(),
                              static_cast<int32_t>(text.size()), out.data(),
                              static_cast<int32_t>(out.size()), &status);
  }
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalization failed");
  }
  out.resize(static_cast<size_t>(length));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  if (text.empty()) return {};

  std::u16string normalized = nfc(to_utf16(text));

  std::vector<uint32_t> codepoints;
  codepoints.reserve(normalized.size());
  bool has_whitespace = false;
  int32_t i = 0;
  const int32_t length = static_cast<int32_t>(normalized.size());
  while (i < length) {
    UChar32 cp;
    U16_NEXT(normalized.data(), i, length, cp);
    cp = u_tolower(cp);
    if (u_isUWhiteSpace(cp)) has_whitespace = true;
    codepoints.push_back(static_cast<uint32_t>(cp));
  }

  std::vector<std::string> tokens;
  if (has_whitespace) {
    std::string current;
    for (uint32_t cp : codepoints) {
      if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
      } else {
        append_utf8(cp, current);
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  } else {
    tokens.reserve(codepoints.size());
    for (uint32_t cp : codepoints) {
      std::string token;
      append_utf8(cp, token);
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

}  // namespace exrec
