#include "pwstab/io.hpp"

#include <fstream>
#include <iomanip>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

json counts_to_json(const std::optional<BlockCounts>& b) {
  if (!b) return nullptr;
  return {{"negative", b->negative}, {"zero", b->zero}, {"ground", b->ground}};
}

}  // namespace

json wave_to_json(const WaveProfile& wave) {
  const PeriodicGrid grid = wave.grid();
  return {{"system", to_string(wave.system.kind())},
          {"coefficients", wave.system.coefficients()},
          {"W", wave.system.depth_inverse()},
          {"L", wave.length},
          {"N", wave.size()},
          {"c", wave.speed},
          {"A1", wave.a1},
          {"A2", wave.a2},
          {"mu", wave.mu},
          {"params", wave.params},
          {"residual", wave.residual},
          {"grid", grid.points()},
          {"phi1", wave.values[0]},
          {"phi2", wave.values[1]}};
}

WaveProfile wave_from_json(const json& doc) {
  try {
    const auto kind = parse_system_kind(doc.at("system").get<std::string>());
    const SystemSpec system =
        kind == SystemKind::lkk
            ? SystemSpec::lkk(doc.at("W").get<double>())
            : SystemSpec::from_coefficients(kind, doc.at("coefficients").get<std::vector<double>>());
    const Field2 values{doc.at("phi1").get<RealVector>(), doc.at("phi2").get<RealVector>()};
    WaveProfile w = make_wave(system, doc.at("L").get<double>(), doc.at("c").get<double>(), values,
                              doc.at("A1").get<double>(), doc.at("A2").get<double>());
    w.mu = doc.value("mu", 1.0);
    if (doc.contains("params")) w.params = doc.at("params").get<std::map<std::string, double>>();
    return w;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed wave document: ") + e.what());
  }
}

json report_to_json(const SpectralReport& r) {
  json doc = {{"system", r.system},
              {"dimension", r.dimension},
              {"negative_count", r.negative_count},
              {"zero_count", r.zero_count},
              {"zero_residual", r.zero_residual},
              {"zero_alignment", r.zero_alignment},
              {"smallest_positive", r.smallest_positive},
              {"gap_tol", r.gap_tol},
              {"spectral_radius", r.spectral_radius},
              {"eigenvalues_low", r.eigenvalues_low},
              {"numeric_ok", r.numeric_ok},
              {"criterion", r.criterion},
              {"criterion_value", r.criterion_value},
              {"criterion_bound", r.criterion_bound},
              {"criterion_ok", r.criterion_ok},
              {"block1", counts_to_json(r.block1)},
              {"block2", counts_to_json(r.block2)},
              {"note", r.note},
              {"h1_verdict", r.h1_verdict}};
  doc["full_negative_count"] = r.full_negative_count ? json(*r.full_negative_count) : json(nullptr);
  return doc;
}

json report_to_json(const H2Report& r) {
  return {{"system", r.system},
          {"method", to_string(r.method)},
          {"I", r.i_value},
          {"I_via_Q", r.i_via_q},
          {"I_formula", r.i_formula},
          {"orthogonality", r.orthogonality},
          {"orthogonality_bound", r.orthogonality_bound},
          {"q_residual", r.q_residual},
          {"route_discrepancy", r.route_discrepancy},
          {"quantities", r.quantities},
          {"h2_verdict", r.h2_verdict}};
}

json stability_to_json(const StabilityResult& r) {
  return {{"max_rho", r.max_rho},
          {"drift_E", r.drift_energy},
          {"drift_F", r.drift_momentum},
          {"drift_M", r.drift_mass},
          {"bounded", r.bounded},
          {"blew_up", r.blew_up},
          {"last_valid_time", r.last_valid_time},
          {"message", r.message},
          {"records", r.history.size()}};
}

void write_json(const json& doc, const std::string& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_wave_csv(const WaveProfile& wave, int component, const std::string& path) {
  if (component < 0 || component > 1) throw DomainError("component must be 0 or 1");
  auto out = open_out(path);
  const PeriodicGrid grid = wave.grid();
  out << "x,value\n";
  for (int j = 0; j < wave.size(); ++j) out << grid.point(j) << ',' << wave.values[component][j] << '\n';
}

void write_phase_csv(const std::vector<PhaseOrbit>& orbits, const std::string& path) {
  auto out = open_out(path);
  out << "orbit,kind,f,df,above_one\n";
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const int above = orbits[i].f_min > 1.0 ? 1 : 0;
    for (const auto& [f, df] : orbits[i].points) {
      out << i << ',' << orbits[i].kind << ',' << f << ',' << df << ',' << above << '\n';
    }
  }
}

}  // namespace pwstab
