#include "tdw/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdw/dispersion.hpp"

namespace tdw {

double StefanWave::u(double x) const { return x <= 0.0 ? 1.0 - std::exp(alpha * x) : 0.0; }

double StefanWave::w(double x) const { return x < 0.0 ? 1.0 : beta * std::exp(-x / (c * gamma)); }

double StefanWave::half_point_offset() const { return std::log(2.0) / alpha; }

double StefanWave::jump_defect() const { return gamma * c * (1.0 - beta) - alpha; }

StefanWave stefan_wave(double c, double gamma) {
    const double cinf = c_infinity(gamma);
    if (!(c >= cinf)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "no Stefan-limit wave for c=" << c << " < c_infinity=" << cinf;
        throw NoWaveBelowMinimalSpeed(msg.str());
    }
    const auto ab = alpha_beta(c, gamma);
    // At c = c_infinity beta vanishes exactly; rounding may leave -1e-17.
    return {c, gamma, ab.alpha, std::max(ab.beta, 0.0)};
}

WaveProfile sample_stefan(const StefanWave& wave, const std::vector<double>& x) {
    WaveProfile p;
    p.x = x;
    p.u.reserve(x.size());
    p.w.reserve(x.size());
    for (double xi : x) {
        p.u.push_back(wave.u_normalized(xi));
        p.w.push_back(wave.w_normalized(xi));
    }
    p.c = wave.c;
    p.method = ProfileMethod::StefanLimit;
    p.params = ModelParams{wave.gamma, 1.0, 0.0};
    return p;
}

}  // namespace tdw
