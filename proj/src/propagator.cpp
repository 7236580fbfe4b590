#include "scatter/propagator.hpp"

namespace scatter {

PropagationReport<double> propagate(const ValidatedPotential& potential, double k2,
                                    const PropagationOptions& options) {
  return fundamental_at_R<double>(potential, k2, options);
}

}  // namespace scatter
