#include "nsc/params.hpp"

#include <cmath>

#include "nsc/errors.hpp"

namespace nsc {

void FluidParams::validate() const {
    require(std::isfinite(mu) && mu > 0.0, "params: mu must be positive");
    require(std::isfinite(mu_prime), "params: mu_prime must be finite");
    require(std::abs(nu() - 1.0) <= 1e-12, "params: 2 mu + mu_prime = 1 required");
    require(std::isfinite(Omega), "params: Omega must be finite");
    require(std::isfinite(eps) && eps > 0.0, "params: eps must be positive");
}

}  // namespace nsc
