#include "tdw/model.hpp"

#include <cmath>
#include <sstream>

namespace tdw {

void ModelParams::validate() const {
    std::ostringstream msg;
    if (!(std::isfinite(gamma) && gamma > 0.0)) {
        msg << "gamma must be positive, got " << gamma;
        throw DomainError(msg.str());
    }
    if (!(std::isfinite(k) && k > 0.0)) {
        msg << "k must be positive, got " << k;
        throw DomainError(msg.str());
    }
    if (!(std::isfinite(eps) && eps >= 0.0 && eps < 0.5 / gamma)) {
        msg << "eps must satisfy 0 <= eps < 1/(2 gamma) = " << 0.5 / gamma << ", got " << eps;
        throw DomainError(msg.str());
    }
}

ModelParams ModelParams::with_eps(double new_eps) const {
    ModelParams p{gamma, k, new_eps};
    p.validate();
    return p;
}

ModelParams make_params(double gamma, double k, double eps) {
    ModelParams p{gamma, k, eps};
    p.validate();
    return p;
}

}  // namespace tdw
