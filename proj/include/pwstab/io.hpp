#pragma once

#include <string>

#include "json.hpp"

#include "pwstab/evolution.hpp"
#include "pwstab/spectral.hpp"
#include "pwstab/waves.hpp"

namespace pwstab {

/// {system, coefficients, W, L, N, c, A1, A2, mu, params, residual, grid, phi1, phi2}.
nlohmann::json wave_to_json(const WaveProfile& wave);
/// Inverse of wave_to_json; coefficients are recomputed from the samples.
WaveProfile wave_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const SpectralReport& report);
nlohmann::json report_to_json(const H2Report& report);
nlohmann::json stability_to_json(const StabilityResult& result);

/// Pretty JSON with shortest round-trip doubles and a trailing newline.
void write_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

/// Columns x,value for one component, 17 significant digits.
void write_wave_csv(const WaveProfile& wave, int component, const std::string& path);

/// Columns orbit,kind,f,df,above_one.
void write_phase_csv(const std::vector<PhaseOrbit>& orbits, const std::string& path);

}  // namespace pwstab
