#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "clsel/dataset.hpp"
#include "clsel/errors.hpp"
#include "clsel/io.hpp"
#include "clsel/mask.hpp"
#include "clsel/math.hpp"
#include "clsel/random.hpp"

using namespace clsel;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("component mask basics") {
  ComponentMask m(5);
  CHECK(m.size() == 5);
  CHECK(m.count() == 0);
  CHECK_FALSE(m.any());
  m.set(1, true);
  m.set(4, true);
  CHECK(m.count() == 2);
  CHECK(m.to_string() == "01001");
  CHECK(m.active() == std::vector<int>{1, 4});

  const auto round = ComponentMask::from_string("01001");
  CHECK(round == m);
  CHECK(round.hash() == m.hash());
  m.set(1, false);
  CHECK(round != m);

  CHECK(ComponentMask::all_ones(3).to_string() == "111");
  CHECK(ComponentMask::from_indices(4, {0, 3}).to_string() == "1001");
  // bit m of the integer maps to component m
  CHECK(ComponentMask::from_integer(4, 0b0101).to_string() == "1010");
  CHECK_THROWS_AS(ComponentMask::from_string("0x1"), ParameterError);
  CHECK_THROWS_AS(m.test(7), ParameterError);

  ComponentMask wide(130);
  wide.set(129, true);
  CHECK(wide.count() == 1);
  CHECK(ComponentMask::from_string(wide.to_string()) == wide);
}

TEST_CASE("random stream determinism and moments") {
  RandomStream a(42), b(42), c(43);
  bool identical = true, differs = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    identical = identical && (va == b.uniform());
    differs = differs || (va != c.uniform());
  }
  CHECK(identical);
  CHECK(differs);

  RandomStream d1 = RandomStream::derive(7, 0);
  RandomStream d2 = RandomStream::derive(7, 1);
  CHECK(d1.uniform() != d2.uniform());

  RandomStream n(123);
  double sum = 0.0, sum2 = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double z = n.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / draws) < 0.02);
  CHECK(std::abs(sum2 / draws - 1.0) < 0.02);

  RandomStream s(5);
  const auto picked = s.sample_without_replacement(10, 4);
  CHECK(picked.size() == 4);
  std::set<int> unique(picked.begin(), picked.end());
  CHECK(unique.size() == 4);
  for (int v : picked) CHECK((v >= 0 && v < 10));
}

TEST_CASE("dataset csv round trip") {
  Dataset data;
  data.observations.resize(3, 2);
  data.observations << 0.1, -2.25, 1e-17, 3.5, 42.0, 0.3333333333333333;
  const std::string path = temp_path("clsel_test_roundtrip.csv");
  write_dataset_csv(path, data);
  const Dataset back = read_dataset_csv(path);
  CHECK(back.n() == 3);
  CHECK(back.d() == 2);
  CHECK(back.observations == data.observations);  // exact round trip
  CHECK_FALSE(back.group.has_value());
  std::remove(path.c_str());
}

TEST_CASE("dataset csv with group column and errors") {
  const std::string path = temp_path("clsel_test_group.csv");
  write_file_atomic(path, "x1,x2,group\n1,2,0\n0,1,1\n");
  const Dataset data = read_dataset_csv(path);
  REQUIRE(data.group.has_value());
  CHECK((*data.group)(0) == 0);
  CHECK((*data.group)(1) == 1);
  CHECK(data.column_names == std::vector<std::string>{"x1", "x2"});

  write_file_atomic(path, "x1,x2\n1,abc\n2,3\n");
  CHECK_THROWS_AS(read_dataset_csv(path), ParameterError);
  write_file_atomic(path, "x1,x2\n1\n");
  CHECK_THROWS_AS(read_dataset_csv(path), ParameterError);
  write_file_atomic(path, "x1,x2\n1,2\n");  // n = 1 < 2
  CHECK_THROWS_AS(read_dataset_csv(path), ParameterError);
  std::remove(path.c_str());
}

TEST_CASE("dataset validation") {
  Dataset data;
  data.observations.resize(2, 2);
  data.observations << 0, 1, 2, 1;
  CHECK_NOTHROW(data.validate(false));
  CHECK_THROWS_AS(data.validate(true), ParameterError);  // no group column
  Eigen::VectorXi g(2);
  g << 0, 1;
  data.group = g;
  CHECK_NOTHROW(data.validate(true));
  data.observations(0, 0) = 3;  // outside {0,1,2}
  CHECK_THROWS_AS(data.validate(true), ParameterError);
}

TEST_CASE("io helpers") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(format_double(kNaN) == "nan");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);

  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  CHECK(fnv1a64("abc") == fnv1a64("abc"));

  const std::string path = temp_path("clsel_test_atomic.txt");
  write_file_atomic(path, "hello");
  CHECK(read_file(path) == "hello");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::remove(path.c_str());
}
