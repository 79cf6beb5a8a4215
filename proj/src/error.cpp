#include "geoscatter/error.hpp"

namespace geoscatter {

const char* code_tag(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateMetric: return "E_DEGENERATE_METRIC";
    case ErrorCode::Domain: return "E_DOMAIN";
    case ErrorCode::Precondition: return "E_PRECONDITION";
    case ErrorCode::PossibleTrapping: return "E_TRAPPING";
    case ErrorCode::Stiffness: return "E_STIFFNESS";
    case ErrorCode::OutOfDomain: return "E_OUT_OF_DOMAIN";
    case ErrorCode::Usage: return "E_USAGE";
    case ErrorCode::CorruptData: return "E_CORRUPT_DATA";
    case ErrorCode::InsufficientData: return "E_INSUFFICIENT_DATA";
    case ErrorCode::IdNotFound: return "E_ID_NOT_FOUND";
    case ErrorCode::AmbiguousLocalization: return "E_AMBIGUOUS";
    case ErrorCode::NotInjective: return "E_NOT_INJECTIVE";
    case ErrorCode::SingularChart: return "E_SINGULAR_CHART";
    case ErrorCode::ChartFailure: return "E_CHART_FAILURE";
    case ErrorCode::IncompatibleBoundary: return "E_INCOMPATIBLE_BOUNDARY";
    case ErrorCode::Inconclusive: return "E_INCONCLUSIVE";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::NonConvex: return "E_NONCONVEX";
  }
  return "E_UNKNOWN";
}

}  // namespace geoscatter
