#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace scarsim {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
    Size,
    Basis,
    Shape,
    UnsupportedSymmetry,
    Window,
    PeakDetection,
    Propagation,
    Schedule,
    Solver,
    UnboundedBeta,
    Bracket,
    PreparationFailed,
    Io,
    Config,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace scarsim
