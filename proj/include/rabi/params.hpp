// params.hpp: Rabi model parameter point and parity sector labels

#pragma once

#include <cmath>

namespace rabi {

// Parameter point (ω, λ, ω₀) of H = ω a†a + λ(a+a†)σₓ + (ω₀/2)σ_z, with ħ = 1.
// The oscillator mass only enters through the quadratures and F₀.
struct ModelParams {
    double omega{1.0};   // mode frequency
    double lambda{0.0};  // coupling strength, >= 0
    double omega0{0.0};  // two-level Bohr frequency, >= 0
    double mass{1.0};

    // F₀ = √(2mω) λ
    double f0() const { return std::sqrt(2.0 * mass * omega) * lambda; }
};

// Throws Error(InvalidArgument) naming the offending field.
void validate(const ModelParams& params);

enum class ParitySector : int { Plus = 1, Minus = -1 };

constexpr int sign(ParitySector p) noexcept { return static_cast<int>(p); }

constexpr ParitySector opposite(ParitySector p) noexcept {
    return p == ParitySector::Plus ? ParitySector::Minus : ParitySector::Plus;
}

} // namespace rabi
