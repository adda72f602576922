// Copyright 2026 AGNav Authors
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
// Minimal XML pull reader and writer helpers for OSM-style documents.
// Only the subset of XML that OSM files use is supported: elements,
// attributes, comments, declarations and character references. Element
// text content is skipped because OSM data lives in attributes.

#ifndef AGNAV_OSM_XML_HPP
#define AGNAV_OSM_XML_HPP

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agnav/errors.hpp"

namespace agnav::xml {

inline std::string escape_attr(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape(std::string_view raw, int line = 0) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out += raw[i];
      continue;
    }
    std::size_t semi = raw.find(';', i);
    if (semi == std::string_view::npos) {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "unterminated character reference at line " + std::to_string(line));
    }
    std::string_view ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      int base = 10;
      std::string_view digits = ent.substr(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits = digits.substr(1);
      }
      unsigned long cp = 0;
      try {
        cp = std::stoul(std::string(digits), nullptr, base);
      } catch (const std::exception&) {
        throw ParseError(ParseErrorCode::kMalformedXml,
                         "bad character reference &" + std::string(ent) + "; at line " +
                             std::to_string(line));
      }
      // UTF-8 encode.
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "unknown entity &" + std::string(ent) + "; at line " + std::to_string(line));
    }
    i = semi;
  }
  return out;
}

/// Fixed-point coordinate text with \p decimals fractional digits.
/// Used by the writer so that re-emitted files are byte stable.
inline std::string format_coord(double value, int decimals = 7) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s(buf);
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // Avoid emitting negative zero.
    bool all_zero = true;
    for (char c : s) {
      if (c != '-' && c != '0' && c != '.') { all_zero = false; break; }
    }
    if (all_zero) s.erase(0, 1);
  }
  return s;
}

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  bool self_closing = false;
  int line = 0;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

enum class Event { kStart, kEnd, kEof };

/// Forward-only reader over an in-memory XML document.
class Reader {
 public:
  explicit Reader(std::string text) : text_(std::move(text)) {}

  /// Advances to the next element boundary. On kStart \p out carries the
  /// element name and attributes, on kEnd only the name.
  Event next(Element& out) {
    for (;;) {
      skip_text();
      if (pos_ >= text_.size()) return Event::kEof;
      // pos_ is at '<'.
      if (starts_with("<?")) {
        skip_until("?>");
        continue;
      }
      if (starts_with("<!--")) {
        skip_until("-->");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        skip_until("]]>");
        continue;
      }
      if (starts_with("<!")) {
        skip_until(">");
        continue;
      }
      if (starts_with("</")) {
        pos_ += 2;
        out = Element{};
        out.line = line_;
        out.name = read_name();
        skip_ws();
        expect('>');
        return Event::kEnd;
      }
      ++pos_;  // consume '<'
      out = Element{};
      out.line = line_;
      out.name = read_name();
      if (out.name.empty()) {
        throw ParseError(ParseErrorCode::kMalformedXml,
                         "empty element name at line " + std::to_string(line_));
      }
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size()) {
          throw ParseError(ParseErrorCode::kMalformedXml,
                           "unterminated tag <" + out.name + "> at line " + std::to_string(out.line));
        }
        char c = text_[pos_];
        if (c == '>') {
          ++pos_;
          return Event::kStart;
        }
        if (c == '/') {
          ++pos_;
          expect('>');
          out.self_closing = true;
          return Event::kStart;
        }
        std::string key = read_name();
        if (key.empty()) {
          throw ParseError(ParseErrorCode::kMalformedXml,
                           "bad attribute in <" + out.name + "> at line " + std::to_string(line_));
        }
        skip_ws();
        expect('=');
        skip_ws();
        if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
          throw ParseError(ParseErrorCode::kMalformedXml,
                           "attribute value must be quoted at line " + std::to_string(line_));
        }
        char quote = text_[pos_++];
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != quote) {
          if (text_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ >= text_.size()) {
          throw ParseError(ParseErrorCode::kMalformedXml,
                           "unterminated attribute value at line " + std::to_string(line_));
        }
        std::string value = unescape(
            std::string_view(text_).substr(start, pos_ - start), line_);
        ++pos_;  // closing quote
        out.attrs.emplace_back(std::move(key), std::move(value));
      }
    }
  }

  /// Consumes everything up to and including the end tag matching a
  /// just-returned non-self-closing kStart event.
  void skip_element() {
    int depth = 1;
    Element e;
    while (depth > 0) {
      Event ev = next(e);
      if (ev == Event::kEof) {
        throw ParseError(ParseErrorCode::kMalformedXml, "unexpected end of document");
      }
      if (ev == Event::kStart && !e.self_closing) ++depth;
      if (ev == Event::kEnd) --depth;
    }
  }

  int line() const { return line_; }

 private:
  bool starts_with(std::string_view prefix) const {
    return text_.compare(pos_, prefix.size(), prefix) == 0;
  }

  void skip_text() {
    while (pos_ < text_.size() && text_[pos_] != '<') {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  void skip_until(std::string_view close) {
    std::size_t found = text_.find(close, pos_);
    if (found == std::string::npos) {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "unterminated construct at line " + std::to_string(line_));
    }
    for (std::size_t i = pos_; i < found; ++i) {
      if (text_[i] == '\n') ++line_;
    }
    pos_ = found + close.size();
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       std::string("expected '") + c + "' at line " + std::to_string(line_));
    }
    ++pos_;
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
           c == '-' || c == '.';
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace agnav::xml

#endif  // AGNAV_OSM_XML_HPP
