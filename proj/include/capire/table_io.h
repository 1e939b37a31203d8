/*
 * Copyright (C) 2026 The capire authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef CAPIRE_TABLE_IO_H
#define CAPIRE_TABLE_IO_H

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

/// A comma-separated table with a header row. Fields are trimmed; no quoting.
struct Table {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position of `name`; throws InputError naming the source when absent.
    std::size_t column(std::string_view name) const;
};

Table parse_table(std::string_view text, const std::string& source = "<memory>");
Table read_table(const std::filesystem::path& path);

/// Require that the header is exactly `expected` (order included).
void require_header(const Table& table, const std::vector<std::string>& expected);

/// Two-column `key,value` table (header `key,value`) or `key = value` lines.
/// Both forms allow `#` comments and blank lines. Duplicate keys are rejected.
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source = "<memory>");
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);
/// Fixed-precision decimal form.
std::string format_fixed(double value, int decimals);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace capire

#endif // CAPIRE_TABLE_IO_H
