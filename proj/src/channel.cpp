#include "semcom/channel.hpp"

#include <cmath>
#include <string>

#include "semcom/rng.hpp"

namespace semcom {

const char* channel_name(ChannelType t) {
  return t == ChannelType::Awgn ? "awgn" : "rayleigh";
}

ChannelType channel_from_name(const std::string& name) {
  if (name == "awgn") return ChannelType::Awgn;
  if (name == "rayleigh") return ChannelType::Rayleigh;
  throw InvalidArgument("unknown channel type: " + name);
}

double noise_power_for(double snr_db) {
  if (!std::isfinite(snr_db)) throw InvalidArgument("noise_power_for: snr must be finite");
  return std::pow(10.0, -snr_db / 10.0);
}

CVector awgn(const CVector& symbols, double snr_db, std::uint64_t seed) {
  if (snr_db >= kNoiselessSnrDb) return symbols;
  const double sigma2 = noise_power_for(snr_db);
  Rng rng(seed);
  CVector out(symbols.size());
  for (Index i = 0; i < symbols.size(); ++i)
    out[i] = symbols[i] + rng.next_cgaussian(sigma2);
  return out;
}

CVector rayleigh_fade(const CVector& symbols, double snr_db, std::uint64_t seed,
                      ChannelRealization& realization) {
  Rng rng(seed);
  realization.h = rng.next_cgaussian(1.0);
  realization.seed = seed;
  CVector out = symbols * realization.h;
  if (snr_db >= kNoiselessSnrDb) return out;
  const double sigma2 = noise_power_for(snr_db);
  for (Index i = 0; i < out.size(); ++i) out[i] += rng.next_cgaussian(sigma2);
  return out;
}

CVector equalize(const CVector& symbols, const ChannelRealization& realization) {
  if (std::abs(realization.h) <= kDeepFadeThreshold)
    throw RuntimeFailure("equalize: deep fade, |h| below threshold");
  return symbols / realization.h;
}

}  // namespace semcom
