#ifndef EDT_ERROR_HPP
#define EDT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace edt {

enum class ErrorKind {
    Parse,
    Schema,
    Domain,
    DegenerateColumn,
    UnusableData,
    Dimension,
    DegenerateDispersion,
    StepSize,
    Config,
    NotConverged,
    Degenerate,
    Fit,
    Io,
};

auto to_string(ErrorKind kind) -> std::string;

// Every failure surfaced by the library is an edt::Error carrying its kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& message)
        : std::runtime_error(message)
        , kind_(kind)
    {
    }

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace edt

#endif
