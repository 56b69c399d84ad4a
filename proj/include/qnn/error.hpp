#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnn {

enum class ErrorCode {
    // quiver-core
    DuplicateId,
    UnknownVertex,
    InvalidLayer,
    MissingInputOrOutput,
    LoopOnSourceOrSink,
    MissingHiddenLoop,
    BackwardEdge,
    IntraLayerEdge,
    NoHiddenVertices,
    KindMismatch,
    CycleDetected,
    // network
    DimensionMismatch,
    VertexSetMismatch,
    NonFinite,
    ZeroTau,
    MissingActivation,
    // layers
    EmptyOutput,
    InvalidLayerSpec,
    InvalidArchitecture,
    BreaksWeightArchitecture,
    // datarep / moduli
    UnsupportedMaxPool,
    UnfoldedBias,
    ParallelFramingEdge,
    ZeroOnForestEdge,
    // trace
    ComplexNetwork,
    InvalidConfig,
    // io
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. `subject` names the offending
/// vertex or edge id when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string detail, std::string subject = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code), detail_(std::move(detail)), subject_(std::move(subject)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::string subject_;
};

} // namespace qnn
