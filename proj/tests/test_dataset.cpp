#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"

#include "catapult/catapult.hpp"

using namespace catapult;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("the four fixed examples and their separation conditions", "[dataset]") {
  const Dataset ex1 = example_dataset(ExampleId::Ex1);
  REQUIRE(ex1.n() == 2);
  REQUIRE(ex1.d() == 1);
  REQUIRE(ex1.features(0, 0) == 1.0);
  REQUIRE(ex1.labels[0] == 1.0);
  REQUIRE(ex1.labels[1] == -1.0);
  auto c1 = classify_separation(ex1);
  REQUIRE(c1.condition == SeparationCondition::Degenerate);
  REQUIRE(c1.degenerate_pairs.size() == 1);
  REQUIRE(c1.degenerate_pairs[0] == std::pair<int, int>(0, 1));

  const Dataset ex2 = example_dataset(ExampleId::Ex2);
  REQUIRE(ex2.n() == 3);
  REQUIRE(classify_separation(ex2).condition == SeparationCondition::NonSeparable);

  const Dataset ex3 = example_dataset(ExampleId::Ex3);
  REQUIRE(ex3.d() == 2);
  auto c3 = classify_separation(ex3);
  REQUIRE(c3.condition == SeparationCondition::Degenerate);
  REQUIRE_FALSE(c3.separator.has_value());

  const Dataset ex4 = example_dataset(ExampleId::Ex4);
  REQUIRE(ex4.n() == 4);
  REQUIRE(classify_separation(ex4).condition == SeparationCondition::NonSeparable);
}

TEST_CASE("d=1 non-separability agrees with brute force", "[dataset]") {
  // In one dimension only the sign of w matters for y_i w x_i >= margin.
  const Dataset ex2 = example_dataset(ExampleId::Ex2);
  for (double w : {-2.0, -1.0, -0.1, 0.1, 1.0, 2.0}) {
    bool all_positive = true;
    for (int i = 0; i < ex2.n(); ++i)
      all_positive = all_positive && (ex2.labels[i] * w * ex2.features(i, 0) > 0);
    REQUIRE_FALSE(all_positive);
  }
}

TEST_CASE("separator certificates are checked, not trusted", "[dataset]") {
  const Dataset sep = synthetic_two_class(12, 3, SeparationCondition::LinearlySeparable, 42);
  const auto cert = classify_separation(sep);
  REQUIRE(cert.condition == SeparationCondition::LinearlySeparable);
  REQUIRE(cert.separator.has_value());
  REQUIRE(std::abs(norm2(*cert.separator) - 1.0) < 1e-12);
  for (int i = 0; i < sep.n(); ++i) {
    double margin = 0;
    for (int k = 0; k < sep.d(); ++k) margin += (*cert.separator)[k] * sep.features(i, k);
    REQUIRE(sep.labels[i] * margin >= 1e-9);
  }
  // The LP must also refuse non-separable data outright.
  const Dataset ex2 = example_dataset(ExampleId::Ex2);
  REQUIRE_FALSE(find_separator(ex2.features, ex2.labels).has_value());
}

TEST_CASE("synthetic generator hits each requested condition", "[dataset]") {
  for (auto want : {SeparationCondition::Degenerate, SeparationCondition::LinearlySeparable,
                    SeparationCondition::NonSeparable}) {
    const Dataset data = synthetic_two_class(10, 2, want, 7);
    REQUIRE(classify_separation(data).condition == want);
    // Deterministic: same seed, identical bytes.
    const Dataset again = synthetic_two_class(10, 2, want, 7);
    REQUIRE(data.features.data == again.features.data);
    REQUIRE(data.labels == again.labels);
  }
  const Dataset deg = synthetic_two_class(6, 3, SeparationCondition::Degenerate, 11);
  for (int k = 0; k < deg.d(); ++k)
    REQUIRE(deg.features(0, k) == deg.features(1, k));
  REQUIRE(deg.labels[0] == -deg.labels[1]);

  REQUIRE_THROWS_AS(synthetic_two_class(1, 2, SeparationCondition::Degenerate, 1), error);
}

TEST_CASE("classification is invariant to row order and positive scaling", "[dataset]") {
  for (auto id : {ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex4}) {
    const Dataset base = example_dataset(id);
    const auto want = classify_separation(base).condition;

    Dataset reversed = base;
    for (int i = 0; i < base.n(); ++i) {
      reversed.labels[i] = base.labels[base.n() - 1 - i];
      for (int k = 0; k < base.d(); ++k)
        reversed.features(i, k) = base.features(base.n() - 1 - i, k);
    }
    REQUIRE(classify_separation(reversed).condition == want);

    Dataset scaled = base;
    for (double& v : scaled.features.data) v *= 3.7;
    REQUIRE(classify_separation(scaled).condition == want);
  }
}

TEST_CASE("csv export import round trip is exact", "[dataset]") {
  const Dataset ex4 = example_dataset(ExampleId::Ex4);
  const std::string p1 = temp_path("catapult_ds_a.csv");
  const std::string p2 = temp_path("catapult_ds_b.csv");
  export_csv(ex4, p1);
  const Dataset back = import_csv(p1);
  REQUIRE(back.features.data == ex4.features.data);
  REQUIRE(back.labels == ex4.labels);

  // Shortest round-trip formatting makes re-export byte identical.
  export_csv(back, p2);
  std::ifstream a(p1), b(p2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  REQUIRE(sa == sb);
  REQUIRE(sa.rfind("label,f0,f1", 0) == 0);
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  // Fractional features survive exactly too.
  Dataset frac = ex4;
  frac.features(0, 0) = 0.1;
  frac.features(1, 1) = -1.0 / 3.0;
  const std::string p3 = temp_path("catapult_ds_c.csv");
  export_csv(frac, p3);
  REQUIRE(import_csv(p3).features.data == frac.features.data);
  std::remove(p3.c_str());
}

TEST_CASE("import rejects malformed files", "[dataset]") {
  try {
    import_csv(temp_path("catapult_no_such_file.csv"));
    FAIL("expected io_failure");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::io_failure);
  }

  const std::string p = temp_path("catapult_bad.csv");
  {
    std::ofstream out(p);
    out << "x,f0\n1,2\n";
  }
  REQUIRE_THROWS_AS(import_csv(p), error);
  {
    std::ofstream out(p);
    out << "label,f0\n1,2,3\n";
  }
  REQUIRE_THROWS_AS(import_csv(p), error);
  {
    std::ofstream out(p);
    out << "label,f0\n0.5,2\n";  // labels must be exactly -1 or +1
  }
  REQUIRE_THROWS_AS(import_csv(p), error);
  std::remove(p.c_str());
}

TEST_CASE("dataset validation", "[dataset]") {
  Dataset bad = example_dataset(ExampleId::Ex1);
  bad.labels[0] = 0.0;
  REQUIRE_THROWS_AS(validate_dataset(bad), error);

  Dataset nan = example_dataset(ExampleId::Ex1);
  nan.features(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(validate_dataset(nan), error);

  Dataset mismatched = example_dataset(ExampleId::Ex1);
  mismatched.labels.pop_back();
  REQUIRE_THROWS_AS(validate_dataset(mismatched), error);
}

TEST_CASE("cifar10 loader on fixture files", "[cifar]") {
  const std::string fix = temp_path("catapult_cifar_fix.bin");
  write_cifar10_fixture(fix, {1, 5, 1, 5, 1, 3});

  const Dataset pair = load_cifar10_pair(fix, 1, 5, 100);
  REQUIRE(pair.n() == 5);  // labels 1,5,1,5,1; class 3 skipped
  REQUIRE(pair.d() == 3072);
  int pos = 0, neg = 0;
  for (double y : pair.labels) (y > 0 ? pos : neg)++;
  REQUIRE(pos == 3);
  REQUIRE(neg == 2);

  // Per-feature mean centering over the loaded subset.
  for (int k : {0, 1, 1535, 3071}) {
    double mean = 0;
    for (int i = 0; i < pair.n(); ++i) mean += pair.features(i, k);
    REQUIRE(std::abs(mean / pair.n()) < 1e-12);
  }
  // Raw bytes were scaled by 1/255 before centering, so the spread stays
  // inside [-1, 1].
  for (double v : pair.features.data) REQUIRE(std::abs(v) <= 1.0);

  // Per-class cap.
  const Dataset capped = load_cifar10_pair(fix, 1, 5, 1);
  REQUIRE(capped.n() == 2);

  // Directory mode reads every .bin in name order.
  const std::string dir = temp_path("catapult_cifar_dir");
  std::filesystem::create_directories(dir);
  write_cifar10_fixture(dir + "/b2.bin", {5}, 10);
  write_cifar10_fixture(dir + "/a1.bin", {1}, 20);
  const Dataset both = load_cifar10_pair(dir, 1, 5, 100);
  REQUIRE(both.n() == 2);
  REQUIRE(both.labels[0] == 1.0);  // a1.bin sorts first and holds class 1
  std::filesystem::remove_all(dir);
  std::remove(fix.c_str());
}

TEST_CASE("cifar10 loader error taxonomy", "[cifar]") {
  const std::string fix = temp_path("catapult_cifar_err.bin");

  try {
    load_cifar10_pair(temp_path("catapult_cifar_missing.bin"), 1, 5, 10);
    FAIL("expected io_failure");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::io_failure);
  }

  write_cifar10_fixture(fix, {1, 5});
  REQUIRE_THROWS_AS(load_cifar10_pair(fix, 1, 1, 10), error);   // same class twice
  REQUIRE_THROWS_AS(load_cifar10_pair(fix, -1, 5, 10), error);  // class out of range
  REQUIRE_THROWS_AS(load_cifar10_pair(fix, 1, 5, 0), error);    // empty cap

  {
    std::ofstream out(fix, std::ios::binary | std::ios::trunc);
    for (int i = 0; i < 3072; ++i) out.put(static_cast<char>(i % 256));  // truncated record
  }
  try {
    load_cifar10_pair(fix, 1, 5, 10);
    FAIL("expected data_invalid");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::data_invalid);
  }

  {
    std::ofstream out(fix, std::ios::binary | std::ios::trunc);
    out.put(static_cast<char>(12));  // label byte beyond 9
    for (int i = 0; i < 3072; ++i) out.put(static_cast<char>(0));
  }
  REQUIRE_THROWS_AS(load_cifar10_pair(fix, 1, 5, 10), error);

  write_cifar10_fixture(fix, {1, 1, 1});  // class 5 never appears
  try {
    load_cifar10_pair(fix, 1, 5, 10);
    FAIL("expected data_invalid");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::data_invalid);
  }
  std::remove(fix.c_str());
}
