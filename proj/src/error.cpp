#include "scarsim/error.hpp"

namespace scarsim {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Size: return "size error";
    case ErrorKind::Basis: return "basis error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::UnsupportedSymmetry: return "unsupported symmetry";
    case ErrorKind::Window: return "window error";
    case ErrorKind::PeakDetection: return "peak detection error";
    case ErrorKind::Propagation: return "propagation error";
    case ErrorKind::Schedule: return "schedule error";
    case ErrorKind::Solver: return "solver error";
    case ErrorKind::UnboundedBeta: return "unbounded beta";
    case ErrorKind::Bracket: return "bracket error";
    case ErrorKind::PreparationFailed: return "preparation failed";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Config: return "config error";
    }
    return "error";
}

void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(error_kind_name(kind)) + ": " + what);
}

}  // namespace scarsim
