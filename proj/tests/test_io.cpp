#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pwstab/errors.hpp"
#include "pwstab/io.hpp"

using namespace pwstab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "pwstab_io_test") {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("wave JSON round trip is exact") {
  TempDir tmp;
  const auto w = build_cnoidal_wave(SystemSpec::kdv({1, 1, 0, 0}), (-1.0 + std::sqrt(3.0)) / 2.0,
                                    2.0 * std::numbers::pi, 0.5, 64);
  const auto file = (tmp.path / "w.json").string();
  write_json(wave_to_json(w), file);
  const auto doc = read_json(file);
  CHECK(doc.at("system") == "kdv");
  CHECK(doc.at("grid").size() == 64);
  const auto back = wave_from_json(doc);
  CHECK(back.system == w.system);
  CHECK(back.values[0] == w.values[0]);
  CHECK(back.values[1] == w.values[1]);
  CHECK(back.speed == w.speed);
  CHECK(back.mu == w.mu);
  CHECK(back.params == w.params);
}

TEST_CASE("writes are deterministic") {
  TempDir tmp;
  const auto w = build_bo_wave(2.0, 2.0 * std::numbers::pi, 64);
  write_json(wave_to_json(w), (tmp.path / "a.json").string());
  write_json(wave_to_json(w), (tmp.path / "b.json").string());
  CHECK(slurp(tmp.path / "a.json") == slurp(tmp.path / "b.json"));
}

TEST_CASE("wave CSV has 17 significant digits") {
  TempDir tmp;
  const auto w = build_cnoidal_wave(2.0 * std::numbers::pi, 0.5, 64);
  const auto file = tmp.path / "phi.csv";
  write_wave_csv(w, 0, file.string());
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,value");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double v = std::stod(line.substr(comma + 1));
    CHECK(v == w.values[0][rows]);
    ++rows;
  }
  CHECK(rows == 64);
  CHECK_THROWS_AS(write_wave_csv(w, 2, file.string()), DomainError);
}

TEST_CASE("history CSV columns") {
  TempDir tmp;
  const auto file = tmp.path / "h.csv";
  write_history_csv({{0.0, 1.0, 2.0, 3.0, 0.1}, {0.5, 1.0, 2.0, 3.0, 0.2}}, file.string());
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,E,F,M,rho");
  std::getline(in, line);
  CHECK(line == "0,1,2,3,0.10000000000000001");
}

TEST_CASE("reports serialize") {
  const auto w = build_cnoidal_wave(2.0 * std::numbers::pi, 0.5, 64);
  const auto doc = report_to_json(check_h1(assemble_operator(w)));
  CHECK(doc.at("negative_count") == 1);
  CHECK(doc.at("h1_verdict").is_boolean());
  CHECK(doc.at("full_negative_count").is_null());
}

TEST_CASE("malformed documents are domain errors") {
  CHECK_THROWS_AS(wave_from_json(nlohmann::json{{"system", "kdv"}}), DomainError);
  CHECK_THROWS_AS(read_json("/nonexistent/file.json"), DomainError);
}
