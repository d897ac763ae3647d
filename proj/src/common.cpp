#include "homogeig/common.hpp"

#include <cstdio>

namespace homogeig {

std::string scale_label(const Scale& eps) {
  if (!eps) return "averaged";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *eps);
  return buf;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::ZeroDenominator: return "ZERO_DENOMINATOR";
    case ErrorCode::MeshTooCoarse: return "MESH_TOO_COARSE";
    case ErrorCode::SingularPencil: return "SINGULAR_PENCIL";
    case ErrorCode::DegenerateFit: return "DEGENERATE_FIT";
    case ErrorCode::Rejected: return "REJECTED";
    case ErrorCode::Config: return "CONFIG";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

Error::Error(ErrorCode code, int index, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + "(" + std::to_string(index) + "): " + detail),
      code_(code),
      detail_(detail),
      index_(index) {}

Domain Domain::interval(double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorCode::InvalidArgument, "interval length must be positive");
  return Domain(1, length, 0.0);
}

Domain Domain::rectangle(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
    throw Error(ErrorCode::InvalidArgument, "rectangle sides must be positive");
  return Domain(2, width, height);
}

}  // namespace homogeig
