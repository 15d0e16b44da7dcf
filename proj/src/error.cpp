#include "odstain/error.hpp"

namespace odstain {

int exit_code_for(Errc code) noexcept {
    switch (code) {
        case Errc::MissingFile:
            return 2;
        case Errc::MalformedImage:
        case Errc::MalformedHeader:
        case Errc::UnsupportedDtype:
        case Errc::UnsupportedOrder:
            return 3;
        case Errc::InvalidParameter:
        case Errc::SingularMatrix:
        case Errc::DegenerateClass:
        case Errc::InvalidTensor:
        case Errc::UndefinedStatistic:
        case Errc::ImageTooSmall:
        case Errc::EmptyReport:
            return 4;
        case Errc::ShapeMismatch:
        case Errc::LengthMismatch:
            return 5;
        case Errc::PairingMismatch:
            return 6;
        case Errc::IoFailure:
        case Errc::Internal:
            return 1;
    }
    return 1;
}

}  // namespace odstain
