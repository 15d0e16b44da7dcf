#pragma once

#include <stdexcept>
#include <string>

namespace odstain {

// One value per failure contract. exit_code_for() maps them onto the CLI's
// stable exit codes: 0 ok, 1 internal, 2 missing input, 3 malformed input
// file, 4 invalid parameter or input data, 5 shape mismatch, 6 pairing
// mismatch.
enum class Errc {
    Internal,
    MissingFile,
    MalformedImage,
    IoFailure,
    MalformedHeader,
    UnsupportedDtype,
    UnsupportedOrder,
    InvalidParameter,
    ShapeMismatch,
    LengthMismatch,
    SingularMatrix,
    DegenerateClass,
    InvalidTensor,
    UndefinedStatistic,
    ImageTooSmall,
    PairingMismatch,
    EmptyReport,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

int exit_code_for(Errc code) noexcept;

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace odstain
