#include "edt/error.hpp"

#include "edt/types.hpp"

#include <cmath>

namespace edt {

auto to_string(ErrorKind kind) -> std::string
{
    switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateColumn: return "degenerate column";
    case ErrorKind::UnusableData: return "unusable data";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::DegenerateDispersion: return "degenerate dispersion";
    case ErrorKind::StepSize: return "step size error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::Degenerate: return "degenerate input";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

void require_simplex(Vector const& gamma, Eigen::Index expected_size, char const* what)
{
    if (gamma.size() != expected_size) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": gamma has length " + std::to_string(gamma.size()) + ", expected "
                + std::to_string(expected_size));
    }
    if (!gamma.allFinite() || (gamma.array() < 0.0).any() || std::abs(gamma.sum() - 1.0) > kSimplexTolerance) {
        throw Error(ErrorKind::Domain, std::string(what) + ": gamma is not on the simplex");
    }
}

} // namespace edt
