// Copyright 2026 The greenrec Authors
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

#include "greenrec/csv.hpp"

#include <algorithm>

#include "greenrec/error.hpp"

namespace greenrec::csv {

Reader::Reader(std::istream& in) : in_(in) {}

int Reader::get() {
  int c = in_.get();
  if (c == '\n') ++line_;
  return c;
}

int Reader::peek() { return in_.peek(); }

bool Reader::next(std::vector<std::string>& fields) {
  if (!bom_checked_) {
    bom_checked_ = true;
    if (peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }

  for (;;) {
    fields.clear();
    if (peek() == std::char_traits<char>::eof()) return false;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool after_quote = false;
    bool any_char = false;
    for (;;) {
      int c = get();
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw RowError(record_line_, "unterminated quoted field");
        fields.push_back(std::move(field));
        break;
      }
      if (quoted) {
        if (c == '"') {
          if (peek() == '"') {
            get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
        any_char = true;
        continue;
      }
      if (c == '\r') {
        if (peek() == '\n') continue;
        c = '\n';
      }
      if (c == '\n') {
        fields.push_back(std::move(field));
        break;
      }
      if (c == '"' && field.empty() && !after_quote) {
        quoted = true;
        any_char = true;
        continue;
      }
      if (after_quote) throw RowError(record_line_, "unexpected character after closing quote");
      field.push_back(static_cast<char>(c));
      any_char = true;
    }
    if (!any_char && fields.size() == 1 && fields[0].empty()) continue;
    return true;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

int column_index(const std::vector<std::string>& header, std::string_view name) {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

}  // namespace greenrec::csv
