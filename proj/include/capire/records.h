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
#ifndef CAPIRE_RECORDS_H
#define CAPIRE_RECORDS_H

#include "capire/engine.h"
#include "capire/features.h"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

/// One row of the long agent-semester log.
struct LongRecord {
    std::string scenario_id;
    int replication = 0;
    int agent_id    = 0;
    int semester    = 0;
    std::string archetype;
    Group group          = Group::stable;
    int n_enrolled       = 0;
    int n_passed_cw      = 0;
    int n_approved_new   = 0;
    int n_failed         = 0;
    int n_approved_total = 0;
    double stress        = 0.0;
    double belonging     = 0.0;
    StructuralSnapshot snapshot;
    TerminalEvent terminal_event = TerminalEvent::none;

    bool operator==(const LongRecord&) const = default;
};

LongRecord to_long_record(const SemesterRecord& rec, std::string_view scenario_id, int replication);

/// Column names of the record files.
const std::vector<std::string>& record_columns();
std::string record_header_line();
/// One CSV line, newline included. Reals use the shortest round-trip form.
void append_record_line(std::string& out, const LongRecord& rec);
LongRecord parse_record_line(std::string_view line, std::string_view source);

/// `<scenario>_<rep>` with a three-digit zero-padded replication.
std::string record_file_stem(std::string_view scenario_id, int replication);

/// True for `<AxByCz>_<digits>.csv` and `.csv.gz` names.
bool is_record_file_name(std::string_view name);

/// Writes header plus rows; a `.gz` suffix selects gzip with a fixed header.
void write_record_file(const std::filesystem::path& path, std::string_view csv_body);
/// Reads a plain or gzip-compressed record file back into text.
std::string read_record_text(const std::filesystem::path& path);
std::vector<LongRecord> read_record_file(const std::filesystem::path& path);

} // namespace capire

#endif // CAPIRE_RECORDS_H
