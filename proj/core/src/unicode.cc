// unicode.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "htrqe/unicode.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>

#include "htrqe/error.h"

namespace htrqe::unicode {

std::size_t FindInvalidUtf8(std::string_view text) {
  const auto *bytes = reinterpret_cast<const std::uint8_t *>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return static_cast<std::size_t>(start);
  }
  return kValidUtf8;
}

void ValidateUtf8(std::string_view text) {
  const std::size_t pos = FindInvalidUtf8(text);
  if (pos != kValidUtf8) {
    throw EncodingError("invalid UTF-8 at byte " + std::to_string(pos), pos);
  }
}

std::u32string Decode(std::string_view utf8) {
  const auto *bytes = reinterpret_cast<const std::uint8_t *>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::u32string out;
  out.reserve(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      throw EncodingError("invalid UTF-8 at byte " + std::to_string(start),
                          static_cast<std::size_t>(start));
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string Encode(char32_t c) {
  char buffer[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<std::uint8_t *>(buffer), n, U8_MAX_LENGTH,
            static_cast<UChar32>(c), error);
  if (error) throw Error("cannot encode code point " + std::to_string(c));
  return std::string(buffer, static_cast<std::size_t>(n));
}

std::string Encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) out += Encode(c);
  return out;
}

std::size_t Length(std::string_view utf8) {
  std::size_t n = 0;
  for (char ch : utf8) {
    // Count every byte that is not a continuation byte.
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
  }
  return n;
}

namespace {

icu::UnicodeString ToIcu(std::string_view utf8) {
  ValidateUtf8(utf8);
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
}

bool IsAscii(std::string_view text) {
  for (char ch : text) {
    if (static_cast<unsigned char>(ch) >= 0x80) return false;
  }
  return true;
}

}  // namespace

std::string ToNfc(std::string_view utf8) {
  // ASCII is always in NFC.
  if (IsAscii(utf8)) return std::string(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString normalized = nfc->normalize(ToIcu(utf8), status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string FoldCase(std::string_view utf8) {
  if (IsAscii(utf8)) {
    std::string out(utf8);
    for (char &ch : out) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
  }
  icu::UnicodeString folded = ToIcu(utf8);
  folded.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  folded.toUTF8String(out);
  return out;
}

bool IsWhitespace(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool IsPunctuationOrSymbol(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

std::string CollapseWhitespace(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  for (char32_t c : Decode(utf8)) {
    if (IsWhitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out += Encode(c);
  }
  return out;
}

}  // namespace htrqe::unicode
