#include "centroflow/errors.hpp"

#include <sstream>

namespace centroflow {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << value;
  return os.str();
}

}  // namespace

NotACurve::NotACurve(double min_value)
    : Error(describe("field is not positive; minimum value ", min_value)), min_value_(min_value) {}

NotConvex::NotConvex(int index, double radius)
    : Error(describe(("radius of curvature is not positive at index " + std::to_string(index) +
                      ": ").c_str(),
                     radius)),
      index_(index),
      radius_(radius) {}

InvalidMap::InvalidMap(double det)
    : Error(describe("linear map is not in SL(2); det = ", det)), det_(det) {}

OriginHit::OriginHit(double x, double norm)
    : Error(describe(("winding map hits the origin near x = " + std::to_string(x) + "; |(-B, Phi')| = ")
                         .c_str(),
                     norm)),
      x_(x) {}

ConvexityLost::ConvexityLost(long step, int index, double radius)
    : Error(describe(("convexity lost at step " + std::to_string(step) + ", index " +
                      std::to_string(index) + ", radius ")
                         .c_str(),
                     radius)),
      step_(step),
      index_(index) {}

}  // namespace centroflow
