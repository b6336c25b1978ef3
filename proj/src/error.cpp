#include "ina/error.hpp"
#include "ina/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace ina {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::DegenerateSystem: return "DegenerateSystem";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
        case ErrorCode::NoEvidence: return "NoEvidence";
        case ErrorCode::EmptyQuestion: return "EmptyQuestion";
        case ErrorCode::UnknownMlsuId: return "UnknownMlsuId";
        case ErrorCode::EmptyModel: return "EmptyModel";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptySuite: return "EmptySuite";
        case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptBundle: return "CorruptBundle";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace log {
namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

void emit(const char* tag, std::string_view message) {
    std::lock_guard lock(g_mutex);
    std::cerr << "[ina " << tag << "] " << message << '\n';
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(std::string_view message) {
    if (g_level >= Level::Warn) emit("warn", message);
}

void info(std::string_view message) {
    if (g_level >= Level::Info) emit("info", message);
}

}  // namespace log
}  // namespace ina
