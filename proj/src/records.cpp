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
#include "capire/records.h"

#include "capire/error.h"
#include "capire/table_io.h"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <regex>

namespace capire
{

namespace
{

void append_int(std::string& out, long long v)
{
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void append_real(std::string& out, double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

bool has_gz_suffix(const std::filesystem::path& path)
{
    return path.extension() == ".gz";
}

std::string gzip(std::string_view text)
{
    z_stream zs{};
    // windowBits 15 + 16 selects a gzip wrapper; zlib writes mtime 0, so output is reproducible
    if (deflateInit2(&zs, 1, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw IoError("deflateInit2 failed");
    }
    std::string out;
    out.resize(deflateBound(&zs, static_cast<uLong>(text.size())));
    zs.next_in   = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
    zs.avail_in  = static_cast<uInt>(text.size());
    zs.next_out  = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc       = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw IoError("gzip compression failed");
    }
    out.resize(zs.total_out);
    return out;
}

std::string gunzip(std::string_view data, const std::filesystem::path& path)
{
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK) {
        throw IoError("inflateInit2 failed");
    }
    std::string out;
    char buf[1 << 16];
    zs.next_in  = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    int rc      = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out  = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc           = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw IoError("corrupt gzip data in " + path.string());
        }
        out.append(buf, sizeof buf - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw IoError("truncated gzip data in " + path.string());
        }
    }
    inflateEnd(&zs);
    return out;
}

} // namespace

LongRecord to_long_record(const SemesterRecord& rec, std::string_view scenario_id, int replication)
{
    LongRecord r;
    r.scenario_id      = scenario_id;
    r.replication      = replication;
    r.agent_id         = rec.agent_id;
    r.semester         = rec.semester;
    r.archetype        = rec.archetype;
    r.group            = rec.group;
    r.n_enrolled       = rec.enrolled.size();
    r.n_passed_cw      = rec.passed_coursework.size();
    r.n_approved_new   = rec.approved_by_exam.size();
    r.n_failed         = rec.failed.size();
    r.n_approved_total = rec.n_approved_total;
    r.stress           = rec.stress;
    r.belonging        = rec.belonging;
    r.snapshot         = rec.snapshot;
    r.terminal_event   = rec.terminal_event;
    return r;
}

const std::vector<std::string>& record_columns()
{
    static const std::vector<std::string> cols = {
        "scenario_id",          "replication",
        "agent_id",             "semester",
        "archetype",            "group",
        "n_enrolled",           "n_passed_cw",
        "n_approved_new",       "n_failed",
        "n_approved_total",     "stress",
        "belonging",            "backbone_completion",
        "blocked_credits",      "distance_to_graduation",
        "bottleneck_approval_ratio", "prerequisites_met_ratio",
        "mean_in_degree_approved",   "mean_out_degree_approved",
        "terminal_event"};
    return cols;
}

std::string record_header_line()
{
    std::string out;
    for (const auto& c : record_columns()) {
        out += out.empty() ? "" : ",";
        out += c;
    }
    out += '\n';
    return out;
}

void append_record_line(std::string& out, const LongRecord& r)
{
    out += r.scenario_id;
    out += ',';
    append_int(out, r.replication);
    out += ',';
    append_int(out, r.agent_id);
    out += ',';
    append_int(out, r.semester);
    out += ',';
    out += r.archetype;
    out += ',';
    out += to_string(r.group);
    for (int v : {r.n_enrolled, r.n_passed_cw, r.n_approved_new, r.n_failed, r.n_approved_total}) {
        out += ',';
        append_int(out, v);
    }
    const auto& s = r.snapshot;
    for (double v : {r.stress, r.belonging, s.backbone_completion}) {
        out += ',';
        append_real(out, v);
    }
    out += ',';
    append_int(out, s.blocked_credits);
    for (double v : {s.distance_to_graduation, s.bottleneck_approval_ratio, s.prerequisites_met_ratio,
                     s.mean_in_degree_approved, s.mean_out_degree_approved}) {
        out += ',';
        append_real(out, v);
    }
    out += ',';
    out += to_string(r.terminal_event);
    out += '\n';
}

LongRecord parse_record_line(std::string_view line, std::string_view source)
{
    auto f = split(line, ',');
    if (f.size() != record_columns().size()) {
        throw InputError(std::string(source) + ": expected " + std::to_string(record_columns().size()) +
                         " fields, got " + std::to_string(f.size()));
    }
    auto to_int = [&](std::size_t i) { return static_cast<int>(parse_int(f[i], record_columns()[i])); };
    auto to_real = [&](std::size_t i) { return parse_double(f[i], record_columns()[i]); };
    LongRecord r;
    r.scenario_id                         = f[0];
    r.replication                         = to_int(1);
    r.agent_id                            = to_int(2);
    r.semester                            = to_int(3);
    r.archetype                           = f[4];
    r.group                               = parse_group(f[5]);
    r.n_enrolled                          = to_int(6);
    r.n_passed_cw                         = to_int(7);
    r.n_approved_new                      = to_int(8);
    r.n_failed                            = to_int(9);
    r.n_approved_total                    = to_int(10);
    r.stress                              = to_real(11);
    r.belonging                           = to_real(12);
    r.snapshot.backbone_completion        = to_real(13);
    r.snapshot.blocked_credits            = to_int(14);
    r.snapshot.distance_to_graduation     = to_real(15);
    r.snapshot.bottleneck_approval_ratio  = to_real(16);
    r.snapshot.prerequisites_met_ratio    = to_real(17);
    r.snapshot.mean_in_degree_approved    = to_real(18);
    r.snapshot.mean_out_degree_approved   = to_real(19);
    r.terminal_event                      = parse_terminal_event(f[20]);
    return r;
}

std::string record_file_stem(std::string_view scenario_id, int replication)
{
    char rep[16];
    std::snprintf(rep, sizeof rep, "%03d", replication);
    return std::string(scenario_id) + "_" + rep;
}

bool is_record_file_name(std::string_view name)
{
    static const std::regex pattern(R"(^A[01]B[01]C[01]_[0-9]{3,}\.csv(\.gz)?$)");
    return std::regex_match(name.begin(), name.end(), pattern);
}

void write_record_file(const std::filesystem::path& path, std::string_view csv_body)
{
    std::string text = record_header_line();
    text += csv_body;
    write_file(path, has_gz_suffix(path) ? gzip(text) : text);
}

std::string read_record_text(const std::filesystem::path& path)
{
    auto data = read_file(path);
    return has_gz_suffix(path) ? gunzip(data, path) : data;
}

std::vector<LongRecord> read_record_file(const std::filesystem::path& path)
{
    auto text = read_record_text(path);
    std::vector<LongRecord> out;
    std::size_t pos = 0;
    bool header     = true;
    const auto source = path.string();
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (header) {
            if (std::string(line) + "\n" != record_header_line()) {
                throw InputError(source + ": unexpected record header");
            }
            header = false;
            continue;
        }
        out.push_back(parse_record_line(line, source));
    }
    if (header) {
        throw InputError(source + ": missing record header");
    }
    return out;
}

} // namespace capire
