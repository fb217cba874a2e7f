#include <crystgraph/error.hpp>

namespace crystgraph {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidStructure: return "InvalidStructure";
    case ErrorKind::MalformedCif: return "MalformedCif";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::UnsupportedOccupancy: return "UnsupportedOccupancy";
    case ErrorKind::InconsistentSymmetry: return "InconsistentSymmetry";
    case ErrorKind::EmptyStructure: return "EmptyStructure";
    case ErrorKind::DegenerateCell: return "DegenerateCell";
    case ErrorKind::InconsistentOps: return "InconsistentOps";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::IncompleteNeighborhood: return "IncompleteNeighborhood";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroMultiplicity: return "ZeroMultiplicity";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::MissingVectors: return "MissingVectors";
    case ErrorKind::MissingLineGraph: return "MissingLineGraph";
    case ErrorKind::NonFiniteActivation: return "NonFiniteActivation";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace crystgraph
