#pragma once

#include <stdexcept>
#include <string>

namespace vlmpipe {

/// Stable error codes carried by every vlmpipe::Error.
enum class Errc {
    // registry
    DuplicateId,
    UnknownId,
    NotResident,
    // pipeline
    EmptyTrace,
    ExecutorFailure,
    InvalidSpec,
    // simulator / profiles
    InvalidProfile,
    MissingReportedData,
    // cost model
    ZeroBaseline,
    EmptyTable,
    MissingParamCounts,
    InvalidFraction,
    // tasks
    NonpositiveDuration,
    EmptyText,
    DimMismatch,
    ZeroVector,
    MissingTruth,
    EmptySelection,
    LengthMismatch,
    DuplicateClip,
    // file handling
    ParseError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::UnknownId: return "UnknownId";
        case Errc::NotResident: return "NotResident";
        case Errc::EmptyTrace: return "EmptyTrace";
        case Errc::ExecutorFailure: return "ExecutorFailure";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidProfile: return "InvalidProfile";
        case Errc::MissingReportedData: return "MissingReportedData";
        case Errc::ZeroBaseline: return "ZeroBaseline";
        case Errc::EmptyTable: return "EmptyTable";
        case Errc::MissingParamCounts: return "MissingParamCounts";
        case Errc::InvalidFraction: return "InvalidFraction";
        case Errc::NonpositiveDuration: return "NonpositiveDuration";
        case Errc::EmptyText: return "EmptyText";
        case Errc::DimMismatch: return "DimMismatch";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::MissingTruth: return "MissingTruth";
        case Errc::EmptySelection: return "EmptySelection";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::DuplicateClip: return "DuplicateClip";
        case Errc::ParseError: return "ParseError";
    }
    return "Error";
}

} // namespace vlmpipe
