#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcoef/errors.hpp"
#include "qcoef/system_io.hpp"
#include "qcoef/thermodynamics.hpp"

using namespace qcoef;

TEST_CASE("system descriptions round trip through JSON") {
  for (const std::string& name : builtin_system_names()) {
    const SystemDescription d = builtin_system(name);
    CHECK(read_system(write_system(d)) == d);
  }
  const SystemDescription two = fixtures::two_map_description();
  CHECK(read_system(write_system(two)) == two);
}

TEST_CASE("system files load by path and by name") {
  const auto dir = std::filesystem::temp_directory_path() / "qcoef_system_io_test";
  std::filesystem::create_directories(dir);
  const SystemDescription two = fixtures::two_map_description();
  write_system_file(two, dir / "two.spec");
  CHECK(read_system_file(dir / "two.spec") == two);
  CHECK(load_system((dir / "two.spec").string()).description() == two);
  CHECK(load_system("two", dir).description() == two);
  CHECK(load_system("gamma3").id() == "gamma3");
  CHECK(load_system("systems/uniform4.spec", dir).id() == "uniform4");
  CHECK_THROWS_AS(load_system("no-such-system", dir), PreconditionError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped system specs match the builtins") {
  for (const std::string& name : builtin_system_names()) {
    const auto path = std::filesystem::path(QCOEF_SYSTEMS_DIR) / (name + ".spec");
    REQUIRE(std::filesystem::exists(path));
    CHECK(read_system_file(path) == builtin_system(name));
  }
}

TEST_CASE("malformed specs are rejected") {
  CHECK_THROWS_AS(read_system("{"), PreconditionError);
  CHECK_THROWS_AS(read_system(R"({"id":"x"})"), PreconditionError);
  std::string text = write_system(builtin_system("gamma3"));
  const auto pos = text.find("\"interval\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 10, "\"triangle\"");
  CHECK_THROWS_AS(read_system(text), PreconditionError);
}

TEST_CASE("builtins have the documented parameters") {
  const InfiniteIFS g = load_system("gamma3");
  CHECK(g.ratio(2) == doctest::Approx(1.0 / 9.0));
  CHECK(g.probability(3) == doctest::Approx(0.125));
  CHECK(quantization_dimension(g, 2.0).kappa == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
  CHECK(load_system("paper-gamma3").dimension() == 2);
  CHECK(load_system("dyadic").thermodynamics_only());
  CHECK(load_system("uniform4").finite());
}
