#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crystgraph {

enum class ErrorKind {
    InvalidStructure,
    MalformedCif,
    MissingField,
    UnknownElement,
    UnsupportedOccupancy,
    InconsistentSymmetry,
    EmptyStructure,
    DegenerateCell,
    InconsistentOps,
    IndexMismatch,
    IncompleteNeighborhood,
    LengthMismatch,
    ZeroMultiplicity,
    ZeroVector,
    MissingVectors,
    MissingLineGraph,
    NonFiniteActivation,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the
/// failure class so callers can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          m_kind(kind) {}

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

} // namespace crystgraph
