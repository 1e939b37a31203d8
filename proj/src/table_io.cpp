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
#include "capire/table_io.h"
#include "capire/error.h"

#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <fstream>
#include <sstream>

namespace capire
{

std::string trim(std::string_view text)
{
    const auto* ws = " \t\r\n";
    auto b         = text.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = text.find_last_not_of(ws);
    return std::string(text.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(text.substr(start)));
            break;
        }
        out.push_back(trim(text.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw InputError(source + ": missing column '" + std::string(name) + "'");
}

Table parse_table(std::string_view text, const std::string& source)
{
    Table table;
    table.source = source;
    std::size_t line_no = 0;
    std::size_t start   = 0;
    while (start <= text.size()) {
        auto end  = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start     = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        auto trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        auto fields = split(trimmed, ',');
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) {
        throw InputError(source + ": empty table (no header)");
    }
    return table;
}

Table read_table(const std::filesystem::path& path)
{
    return parse_table(read_file(path), path.string());
}

void require_header(const Table& table, const std::vector<std::string>& expected)
{
    if (table.header != expected) {
        std::string want;
        for (const auto& h : expected) {
            want += (want.empty() ? "" : ",") + h;
        }
        throw InputError(table.source + ": header must be '" + want + "'");
    }
}

std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source)
{
    std::map<std::string, std::string> out;
    std::size_t start   = 0;
    std::size_t line_no = 0;
    bool first          = true;
    while (start <= text.size()) {
        auto end  = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start     = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        auto content = std::string_view(line);
        if (auto hash = content.find('#'); hash != std::string_view::npos) {
            content = content.substr(0, hash);
        }
        auto trimmed = trim(content);
        if (trimmed.empty()) {
            continue;
        }
        auto sep = trimmed.find('=');
        if (sep == std::string::npos) {
            sep = trimmed.find(',');
        }
        if (sep == std::string::npos) {
            throw InputError(source + ":" + std::to_string(line_no) + ": expected 'key = value' or 'key,value'");
        }
        auto key   = trim(std::string_view(trimmed).substr(0, sep));
        auto value = trim(std::string_view(trimmed).substr(sep + 1));
        if (first && key == "key" && value == "value") {
            first = false;
            continue;
        }
        first = false;
        if (key.empty()) {
            throw InputError(source + ":" + std::to_string(line_no) + ": empty key");
        }
        if (!out.emplace(key, value).second) {
            throw InputError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path)
{
    return parse_key_values(read_file(path), path.string());
}

double parse_double(std::string_view text, std::string_view what)
{
    double value = 0.0;
    auto t       = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InputError("invalid number for " + std::string(what) + ": '" + t + "'");
    }
    return value;
}

long long parse_int(std::string_view text, std::string_view what)
{
    long long value = 0;
    auto t          = trim(text);
    auto [ptr, ec]  = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InputError("invalid integer for " + std::string(what) + ": '" + t + "'");
    }
    return value;
}

bool parse_bool(std::string_view text, std::string_view what)
{
    auto t = trim(text);
    if (t == "1" || t == "true" || t == "yes") {
        return true;
    }
    if (t == "0" || t == "false" || t == "no") {
        return false;
    }
    throw InputError("invalid boolean for " + std::string(what) + ": '" + t + "'");
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int decimals)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    std::string s(buf.data(), ptr);
    if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1); // no negative zero
    }
    return s;
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("digest", "SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace capire
