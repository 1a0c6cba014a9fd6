// Copyright 2026 The Hanforge Authors.
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

#ifndef HANFORGE_TEXT_HPP_
#define HANFORGE_TEXT_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hanforge {

// Splits UTF-8 text into one string per code point. Malformed bytes are
// passed through as single-byte characters.
std::vector<std::string> split_chars(std::string_view text);

std::string join_chars(std::span<const std::string> chars, std::size_t begin, std::size_t end);
std::string join_chars(std::span<const std::string> chars);

// Splits on runs of ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

}  // namespace hanforge

#endif  // HANFORGE_TEXT_HPP_
