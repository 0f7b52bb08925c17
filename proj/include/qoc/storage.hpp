#pragma once

#include "qoc/config.hpp"
#include "qoc/optimizer.hpp"

#include <string>

namespace qoc {

// One optimized schedule on disk, with enough provenance to re-evaluate it:
// the task it was built for, the error rung and ensemble seed it trained
// under, and the fingerprint of the configuration that shaped it.
struct ScheduleFile {
    Task task = Task::ParallelX;
    double deltaJ = 0.0;
    std::uint64_t seed = 0;
    std::string configFingerprint;
    PulseSchedule schedule;

    friend bool operator==(const ScheduleFile&, const ScheduleFile&) = default;
};

std::string serialize_schedule_file(const ScheduleFile& f);
ScheduleFile parse_schedule_file(const std::string& text);
ScheduleFile load_schedule_file(const std::string& path);

// Content hash over the schedule's canonical text (geometry plus every
// amplitude), as 16 hex digits.
std::string schedule_content_hash(const PulseSchedule& s);

// A ladder run in progress: every finished cell, bound to the fingerprint
// of the configuration that produced it.
struct LadderCheckpoint {
    std::string configFingerprint;
    LadderResults cells;
};

std::string serialize_checkpoint(const LadderCheckpoint& c);
LadderCheckpoint parse_checkpoint(const std::string& text);
LadderCheckpoint load_checkpoint(const std::string& path);

// Write-to-temporary-then-rename, so a crash never leaves a torn file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

} // namespace qoc
