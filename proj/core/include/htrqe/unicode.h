// unicode.h
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
//
// UTF-8 helpers. Characters are Unicode code points throughout htrqe.

#ifndef HTRQE_UNICODE_H_
#define HTRQE_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace htrqe::unicode {

inline constexpr std::size_t kValidUtf8 = static_cast<std::size_t>(-1);

// Byte offset of the first byte that does not start a well-formed UTF-8
// sequence, or kValidUtf8.
std::size_t FindInvalidUtf8(std::string_view text);

// Throws EncodingError carrying the offset of the first offending byte.
void ValidateUtf8(std::string_view text);

std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view text);
std::string Encode(char32_t c);

// Number of code points.
std::size_t Length(std::string_view utf8);

// Canonical composition (NFC).
std::string ToNfc(std::string_view utf8);

// Full default case folding.
std::string FoldCase(std::string_view utf8);

bool IsWhitespace(char32_t c);
// General categories P* and S*.
bool IsPunctuationOrSymbol(char32_t c);

// Collapses whitespace runs to one ASCII space and trims both ends.
std::string CollapseWhitespace(std::string_view utf8);

}  // namespace htrqe::unicode

#endif  // HTRQE_UNICODE_H_
