#pragma once

#include <stdexcept>
#include <string>
#include <cmath>

namespace bhchain {

inline constexpr const char* kVersion = "0.1.0";

enum class Boundary { HardWall, Periodic };

inline std::string to_string(Boundary b) {
    return b == Boundary::HardWall ? "hard_wall" : "periodic";
}

/// Physical and boundary parameters of one chain. Times are measured in 1/J
/// and U, mu carry the same units as J.
struct ChainParams {
    int L = 2;
    double J = 1.0;
    double U = 0.0;
    double mu = 0.0;
    Boundary boundary = Boundary::HardWall;
    double norm = 1.0;  // total action sum(I_j)

    bool periodic() const { return boundary == Boundary::Periodic; }

    void validate() const {
        if (L < 2) throw std::invalid_argument("ChainParams: L must be >= 2");
        if (!(J >= 0.0) || !std::isfinite(J)) throw std::invalid_argument("ChainParams: J must be finite and >= 0");
        if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("ChainParams: norm must be finite and > 0");
        if (!std::isfinite(U) || !std::isfinite(mu)) throw std::invalid_argument("ChainParams: U, mu must be finite");
    }
};

}  // namespace bhchain
