#pragma once

#include <cstdint>

#include "semcom/types.hpp"

namespace semcom {

enum class ChannelType { Awgn, Rayleigh };

const char* channel_name(ChannelType t);
ChannelType channel_from_name(const std::string& name);

// SNR values at or above this are treated as noiseless.
inline constexpr double kNoiselessSnrDb = 200.0;
// Fades with |h| at or below this cannot be equalized.
inline constexpr double kDeepFadeThreshold = 1e-12;

struct ChannelRealization {
  Complex h{1.0, 0.0};
  std::uint64_t seed = 0;
};

// Noise variance against unit signal power: 10^(-snr/10).
double noise_power_for(double snr_db);

// out = in + n, n i.i.d. circular complex Gaussian with total variance
// sigma^2 per symbol. Pure in (input, snr, seed).
CVector awgn(const CVector& symbols, double snr_db, std::uint64_t seed);

// Flat block fading: one scalar h ~ CN(0,1) for the whole vector, then
// additive noise as in awgn. h is returned for equalization.
CVector rayleigh_fade(const CVector& symbols, double snr_db, std::uint64_t seed,
                      ChannelRealization& realization);

// Zero-forcing with perfect CSI: out = in / h. Throws on a deep fade.
CVector equalize(const CVector& symbols, const ChannelRealization& realization);

}  // namespace semcom
