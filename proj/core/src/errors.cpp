#include "pagecusum/errors.hpp"

#include <cmath>
#include <sstream>

namespace pagecusum {

void require_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 0.5)) {
    std::ostringstream os;
    os << "gamma must lie in [0, 0.5), got " << gamma;
    throw ValidationError(os.str());
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1), got " << alpha;
    throw ValidationError(os.str());
  }
}

}  // namespace pagecusum
