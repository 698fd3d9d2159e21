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

#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace greenrec::csv {

/// RFC-4180 record reader. Handles quoted fields with embedded commas,
/// doubled quotes, CR/LF line endings and newlines inside quotes. A leading
/// UTF-8 byte-order mark is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Blank lines are skipped.
  bool next(std::vector<std::string>& fields);

  /// Physical line number (1-based) where the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  int get();
  int peek();

  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool bom_checked_ = false;
};

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Header-name → column-position lookup; returns -1 when absent.
int column_index(const std::vector<std::string>& header, std::string_view name);

}  // namespace greenrec::csv
