#pragma once

// Generated by tests/oracles/derive.py; do not edit by hand.

namespace frozen {

// (2 pi y)^2, y golden
inline constexpr double kGoldenSpeedSq = 15.079413702802341092;
inline constexpr double kCosDeviation10 = 0.057586843430875994206;
inline constexpr double kCosDeviation100 = 0.0062134460800698261548;
inline constexpr double kCosDeviation1000 = 0.00011434796651550563548;
// int cos/f / int 1/f, f = 1 + 0.3 cos
inline constexpr double kTimeChangeCosMean = -0.15353599527684783616;
// J_n(0.5)
inline constexpr double kBesselHalf0 = 0.93846980724081290423;
inline constexpr double kBesselHalf1 = 0.24226845767487388638;
inline constexpr double kBesselHalf2 = 0.030604023458682641307;
inline constexpr double kBesselHalf3 = 0.0025637299945872440754;
inline constexpr double kBesselHalf4 = 0.00016073647636428759684;
// c_k for eta = (0.5/2pi) sin, golden y
inline constexpr double kSkewCorrRe1 = -0.24226845767487388638;
inline constexpr double kSkewCorrIm1 = -2.0320753035952478331e-52;
inline constexpr double kSkewCorrRe2 = 0.016235557938318370797;
inline constexpr double kSkewCorrIm2 = 8.3523897190381113942e-53;
inline constexpr double kSkewCorrRe3 = 0.00027765160439942866967;
inline constexpr double kSkewCorrIm3 = -2.2609724727814794565e-51;
inline constexpr double kSkewCorrRe10 = 1.0520864234181827224e-15;
inline constexpr double kSkewCorrIm10 = 1.3697919139222502686e-50;

}  // namespace frozen
