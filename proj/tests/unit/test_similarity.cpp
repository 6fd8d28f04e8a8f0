#include <doctest.h>

#include <scribe/errors.hpp>
#include <scribe/similarity.hpp>

using namespace scribe;

namespace {

ConfusionMatrix table_a() {
  return ConfusionMatrix(4, {45, 11, 0, 0, 0, 73, 0, 0, 0, 0, 31, 24, 0, 0, 0, 67});
}

ConfusionMatrix table_b() {
  return ConfusionMatrix(8, {45, 11, 0, 0, 0, 0, 0, 0,  //
                             6, 73, 0, 0, 0, 0, 0, 7,   //
                             0, 0, 31, 24, 0, 0, 0, 0,  //
                             0, 0, 0, 67, 0, 0, 0, 0,   //
                             0, 0, 0, 0, 5, 1, 0, 0,    //
                             0, 0, 11, 0, 25, 11, 0, 0, //
                             0, 0, 0, 0, 0, 0, 2, 0,    //
                             0, 0, 0, 0, 0, 0, 5, 14});
}

} // namespace

TEST_CASE("four-class similarity on the dummy matrix") {
  const auto a = table_a();
  CHECK(similarity4(a, 3, 4) == 24);
  CHECK(similarity4(a, 4, 3) == 24);
  CHECK(similarity4(a, 1, 2) == 11);
  CHECK(similarity4(a, 2, 3) == 0);
  CHECK(a.off_diagonal_mass() == 35);
  CHECK(a.accuracy() == doctest::Approx(216.0 / 251.0));
  CHECK_THROWS_AS(similarity4(a, 2, 2), ValidationError);
  CHECK_THROWS_AS(similarity4(a, 0, 2), ValidationError);
}

TEST_CASE("eight-class block similarity on the dummy matrix") {
  const auto b = table_b();
  CHECK(similarity8(b, 3, 5) == 11);
  CHECK(similarity8(b, 1, 7) == 7);
  CHECK(similarity8(b, 7, 1) == 7);
  CHECK(similarity8(b, 1, 3) == 0);
  CHECK(b.off_block_mass() == 18);
  CHECK_THROWS_AS(similarity8(b, 2, 5), ValidationError);
  CHECK_THROWS_AS(similarity8(b, 3, 3), ValidationError);
  CHECK_THROWS_AS(similarity8(table_a(), 1, 3), ValidationError);
}

TEST_CASE("matrix construction and summing") {
  CHECK_THROWS_AS(ConfusionMatrix(4, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(ConfusionMatrix(2, {1, -1, 0, 0}), ValidationError);
  const auto s = sum_matrices(std::vector<ConfusionMatrix>{
      ConfusionMatrix(2, {1, 2, 3, 4}, {"m/v01/1"}), ConfusionMatrix(2, {10, 0, 0, 10}, {"m/v01/2"})});
  CHECK(s.at(1, 1) == 11);
  CHECK(s.at(2, 1) == 3);
  CHECK(s.provenance() == std::vector<std::string>{"m/v01/1", "m/v01/2"});
  CHECK_THROWS_AS(sum_matrices(std::vector<ConfusionMatrix>{ConfusionMatrix(2), ConfusionMatrix(4)}),
                  ValidationError);
  CHECK(table_a().scaled(3).at(3, 4) == 72);
}

TEST_CASE("confusion matrix from predictions") {
  std::vector<PredictionRecord> recs{
      {"a", 1, {1, 0}, 1}, {"b", 1, {0, 1}, 2}, {"c", 2, {0, 1}, 2}, {"d", 2, {0, 1}, 2}};
  const auto m = confusion_matrix(recs, 2, "m/v01/1");
  CHECK(m.at(1, 1) == 1);
  CHECK(m.at(1, 2) == 1);
  CHECK(m.at(2, 2) == 2);
  recs[0].true_class.reset();
  CHECK_THROWS_AS(confusion_matrix(recs, 2), ValidationError);
}

TEST_CASE("threshold predicates") {
  const RelationThresholds t;
  CHECK(near_zero(1, 100, t));
  CHECK_FALSE(near_zero(2, 100, t));
  CHECK(much_greater(5, 0, t));
  CHECK(much_greater(1, 0, t));
  CHECK_FALSE(much_greater(0, 0, t));
  CHECK(much_greater(1000, 103, t));
  CHECK_FALSE(much_greater(100, 90, t));
  CHECK(comparable(100, 90, t));
  CHECK(much_greater(50, 10, t));
  CHECK_FALSE(much_greater(49, 10, t));
  CHECK(comparable(0, 0, t));
  CHECK_FALSE(comparable(1, 0, t));
  CHECK(comparable(80, 100, t));
  CHECK(comparable(125, 100, t));
  CHECK_FALSE(comparable(126, 100, t));
  RelationThresholds bad;
  bad.comparable_low = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("standard relations on constructed matrices") {
  // 4-class: s(1,4) = 30 > s(3,4) = 20 >> s(1,3) = 2, s(2,3) = 0.
  ConfusionMatrix m(4);
  for (int i = 1; i <= 4; ++i) m.at(i, i) = 500;
  m.at(1, 4) = 20;
  m.at(4, 1) = 10;
  m.at(3, 4) = 12;
  m.at(4, 3) = 8;
  m.at(1, 3) = 2;
  const auto r = similarity_report("vgg19", m);
  REQUIRE(r.relations.size() == 2);
  CHECK(r.relations[0].name == "separation");
  CHECK(r.relations[0].holds);
  CHECK(r.relations[1].holds);
  CHECK(r.relations[1].branch == "greater");
  CHECK(r.label({1, 4}) == "(1,4)");

  m.at(1, 4) = 12; // s(1,4) = 22 vs 20: comparable and greater
  CHECK(similarity_report("vgg19", m).relations[1].branch == "both");
  m.at(1, 4) = 7; // 17 vs 20: comparable only
  CHECK(similarity_report("vgg19", m).relations[1].branch == "comparable");
  m.at(2, 3) = 40; // separation breaks
  const auto broken = similarity_report("vgg19", m);
  CHECK_FALSE(broken.relations[0].holds);
}

TEST_CASE("eight-class report labels and relations") {
  const auto r = similarity_report("resnet50", table_b());
  CHECK(r.scheme == 8);
  CHECK(r.value({3, 5}) == 11);
  CHECK(r.label({1, 7}) == "(1&2,7&8)");
  CHECK(r.reference_mass == 18);
  CHECK(r.relations[0].name == "separation");
  CHECK_FALSE(r.relations[0].holds);
}

TEST_CASE("similarity orderings stay within one model") {
  const auto m = ConfusionMatrix(4, {45, 11, 0, 0, 0, 73, 0, 0, 0, 0, 31, 24, 0, 0, 0, 67}, {"vgg19/v01/1033"});
  CHECK_THROWS_AS(similarity_report("resnet50", m), ValidationError);
  const auto a = similarity_report("vgg19", m);
  CHECK(compare_pairs(a, {3, 4}, a, {1, 2}) == 1);
  const auto b = similarity_report("resnet50", table_a());
  CHECK_THROWS_AS(compare_pairs(a, {3, 4}, b, {3, 4}), ValidationError);
}

TEST_CASE("matrix and report serialisation") {
  const auto m = ConfusionMatrix(4, {45, 11, 0, 0, 0, 73, 0, 0, 0, 0, 31, 24, 0, 0, 0, 67}, {"m/v01/1"});
  CHECK(confusion_from_json(confusion_to_json(m)) == m);
  const auto csv = confusion_to_csv(m);
  CHECK(csv.rfind("true\\predicted,Class 1,Class 2,Class 3,Class 4\n", 0) == 0);
  CHECK(csv.find("Class 3,0,0,31,24\n") != std::string::npos);
  const auto j = report_to_json(similarity_report("m", m));
  CHECK(j.find("\"(3,4)\": 24") != std::string::npos);
  CHECK_THROWS_AS(confusion_from_json("[1,2]"), ParseError);
}
