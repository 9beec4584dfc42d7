#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"
#include "velo/config.hpp"
#include "velo/csv.hpp"

using namespace velo;
using velo::testing::bike_schema;
using velo::testing::reference_design;

TEST_CASE("design CSV round-trips exactly") {
  const DesignSchema &s = bike_schema();
  std::vector<Design> designs = sample_uniform(s, 25, 8);
  designs.push_back(reference_design());

  const std::string text = designs_to_csv(designs, s);
  const std::vector<Design> back = designs_from_csv(text, s);
  REQUIRE(back.size() == designs.size());
  for (std::size_t i = 0; i < designs.size(); ++i) CHECK(back[i] == designs[i]);

  // Header row carries the 70 parameter names.
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(split_csv_line(header).size() == 70);
  CHECK(text.find("STEEL") != std::string::npos);
  CHECK(text.find("true") != std::string::npos);
}

TEST_CASE("design CSV accepts permuted column order") {
  const DesignSchema &s = bike_schema();
  const Design d = reference_design();
  const std::string text = designs_to_csv({d}, s);

  // Move the last column to the front.
  const auto nl = text.find('\n');
  std::string header = text.substr(0, nl);
  std::string row = text.substr(nl + 1, text.find('\n', nl + 1) - nl - 1);
  auto rotate = [](const std::string &line) {
    const auto cells = split_csv_line(line);
    std::string out = cells.back();
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) out += "," + cells[i];
    return out;
  };
  const std::string permuted = rotate(header) + "\n" + rotate(row) + "\n";
  const auto back = designs_from_csv(permuted, s);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == d);
}

TEST_CASE("design CSV errors carry row and column context") {
  const DesignSchema &s = bike_schema();
  const std::string text = designs_to_csv({reference_design()}, s);

  SUBCASE("unknown category label") {
    std::string broken = text;
    broken.replace(broken.find("STEEL"), 5, "UNOBT");
    CHECK_THROWS_WITH_AS(designs_from_csv(broken, s), doctest::Contains("MATERIAL"), IoError);
  }
  SUBCASE("missing column") {
    const auto nl = text.find('\n');
    std::string header = text.substr(0, nl);
    const std::string victim = "CS textfield,";
    header.replace(header.find(victim), victim.size(), "Nope,");
    CHECK_THROWS_AS(designs_from_csv(header + text.substr(nl), s), IoError);
  }
  SUBCASE("short row") {
    CHECK_THROWS_WITH_AS(designs_from_csv(text + "1,2,3\n", s), doctest::Contains("fields"),
                         IoError);
  }
}

TEST_CASE("config round-trips through JSON") {
  EvalConfig cfg = default_config();
  cfg.embedding_dim = 48;
  cfg.loads.planar_n = 1250.0;
  cfg.nsga2.population = 64;
  cfg.use_case_road.knee = {141.0, 151.0};
  cfg.desk.dataset_size = 333;

  const std::string path =
      (std::filesystem::temp_directory_path() / "velo_config_test.json").string();
  save_config(path, cfg);
  const EvalConfig back = load_config(path);
  CHECK(back.embedding_dim == 48);
  CHECK(back.loads.planar_n == 1250.0);
  CHECK(back.nsga2.population == 64);
  CHECK(back.use_case_road.knee.lo == 141.0);
  CHECK(back.desk.dataset_size == 333);
  // Untouched fields keep their defaults.
  CHECK(back.aero.headwind_ms == cfg.aero.headwind_ms);
  CHECK(back.materials.lookup("CARBON").density_kgm3 ==
        cfg.materials.lookup("STEEL").density_kgm3);
  std::filesystem::remove(path);
}

TEST_CASE("bundled default config loads") {
  const EvalConfig cfg = load_config(bundled_config_path());
  CHECK(cfg.penalty.alpha == 10.0);
  CHECK(cfg.penalty.beta == 10.0);
  CHECK(cfg.embedding_dim == 512);
}

TEST_CASE("partial config files keep defaults elsewhere") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "velo_config_partial.json").string();
  {
    std::ofstream out(path);
    out << R"({"nsga2": {"generations": 17}})";
  }
  const EvalConfig cfg = load_config(path);
  CHECK(cfg.nsga2.generations == 17);
  CHECK(cfg.nsga2.population == default_config().nsga2.population);
  CHECK(cfg.embedding_dim == 512);
  std::filesystem::remove(path);
}
