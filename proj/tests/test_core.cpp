#include <cmath>
#include <sstream>

#include "datscore/dataset.hpp"
#include "datscore/errors.hpp"
#include "datscore/rng.hpp"
#include "doctest.h"

using namespace datscore;

namespace {

std::vector<EvalExample> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in, "mem");
}

const char* kThreeRecords =
    R"({"id":"a","src":"le chat","src_lang":"fr","ref":"the cat","hyp":"a cat","tgt_lang":"en","human":0.5})"
    "\n"
    R"({"id":"b","src":"le chien","src_lang":"fr","ref":"the dog","hyp_better":"the dog","hyp_worse":"dog the","tgt_lang":"en"})"
    "\n"
    R"({"id":"c","src":"el sol","src_lang":"es","ref":"the sun","hyp":"sun","tgt_lang":"en","trans1":"the sun","trans1_lang":"en","trans2":"el sol","trans2_lang":"es"})"
    "\n";

}  // namespace

TEST_CASE("language codes follow the two-or-three lowercase letter shape") {
  CHECK(LanguageCode::is_valid("en"));
  CHECK(LanguageCode::is_valid("yue"));
  CHECK_FALSE(LanguageCode::is_valid("EN"));
  CHECK_FALSE(LanguageCode::is_valid("e"));
  CHECK_FALSE(LanguageCode::is_valid("engl"));
  CHECK_FALSE(LanguageCode::is_valid("e1"));
  CHECK_THROWS_AS(LanguageCode("x"), Error);
}

TEST_CASE("directions parse and reject self loops") {
  const auto d = Direction::parse("trans2->hypo");
  CHECK(d.from == EntityKind::Trans2);
  CHECK(d.to == EntityKind::Hypo);
  CHECK(d.name() == "trans2->hypo");
  CHECK_THROWS_AS(Direction::parse("hypo->hypo"), Error);
  CHECK_THROWS_AS(Direction::parse("src-hypo"), Error);
  CHECK_THROWS_AS(Direction::parse("tgt->hypo"), Error);
}

TEST_CASE("three well-formed records validate cleanly") {
  const auto examples = parse(kThreeRecords);
  REQUIRE(examples.size() == 3);
  const auto report = validate_dataset(examples);
  CHECK(report.violations.empty());
  CHECK(report.accepted());

  CHECK(examples[0].is_direct_assessment());
  CHECK(std::get<DirectAssessment>(*examples[0].human).score == 0.5);
  CHECK(examples[1].is_relative_ranking());
  CHECK(examples[1].hyp.text == "the dog");
  CHECK(examples[2].trans1->lang.str() == "en");
  CHECK(examples[2].trans2->kind == EntityKind::Trans2);
}

TEST_CASE("texts are trimmed at parse time and otherwise kept verbatim") {
  const auto ex = parse(R"({"id":"a","src":"  Le  Chat ","src_lang":"fr","ref":"x","hyp":"\tA cat\n","tgt_lang":"en"})");
  CHECK(ex[0].src.text == "Le  Chat");
  CHECK(ex[0].hyp.text == "A cat");
  CHECK_FALSE(ex[0].human.has_value());
}

TEST_CASE("empty hypothesis text is reported for that id") {
  const auto ex = parse(R"({"id":"z","src":"a","src_lang":"fr","ref":"b","hyp":"   ","tgt_lang":"en"})");
  const auto report = validate_dataset(ex);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].id == "z");
  CHECK(report.violations[0].message.find("empty entity text") != std::string::npos);
  CHECK_FALSE(report.accepted());
}

TEST_CASE("duplicate ids are reported") {
  const auto ex = parse(
      R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en"})"
      "\n"
      R"({"id":"a","src":"d","src_lang":"fr","ref":"e","hyp":"f","tgt_lang":"en"})");
  const auto report = validate_dataset(ex);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].message == "duplicate id");
  CHECK(report.violations[0].index == 1);
}

TEST_CASE("relative ranking with identical hypotheses and non-finite DA are violations") {
  auto ex = parse(R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp_better":"c","hyp_worse":"c","tgt_lang":"en"})");
  CHECK(validate_dataset(ex).violations.size() == 1);

  ex = parse(R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en","human":1.0})");
  ex[0].human = DirectAssessment{std::nan("")};
  CHECK(validate_dataset(ex).violations.size() == 1);
}

TEST_CASE("malformed records raise positional parse errors") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string ok = R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en"})";
  CHECK(line_of(ok + "\n{not json\n") == 2);
  CHECK(line_of(ok + "\n\n" + R"({"id":"b","src":"a","src_lang":"fr","ref":"b","tgt_lang":"en"})") == 3);
  CHECK(line_of(R"({"id":"a","src":"a","src_lang":"FR","ref":"b","hyp":"c","tgt_lang":"en"})") == 1);
  CHECK(line_of(R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en","extra":1})") == 1);
  CHECK(line_of(R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en","trans1":"x"})") == 1);
  CHECK(line_of(R"({"id":"a","src":"a","src_lang":"fr","ref":"b","hyp":"c","tgt_lang":"en","human":"high"})") == 1);
  CHECK(line_of(R"(["id"])") == 1);
}

TEST_CASE("canonical files round-trip byte for byte") {
  CHECK([&] {
    std::istringstream in(kThreeRecords);
    std::ostringstream out;
    write_dataset(out, parse_dataset(in, "mem"));
    return out.str();
  }() == kThreeRecords);

  // Property: serialize(parse(serialize(x))) == serialize(x) for random records.
  Xoshiro256StarStar rng(7);
  const auto word = [&] {
    static const char* pool[] = {"el", "gato", "the", "ça", "naïve", "\"quoted\"", "tab\there", "日本"};
    std::string s;
    const auto n = 1 + rng.next() % 4;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (!s.empty()) s += ' ';
      s += pool[rng.next() % 8];
    }
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    EvalExample ex{.id = "r" + std::to_string(trial),
                   .src = {EntityKind::Src, word(), LanguageCode("de")},
                   .ref = {EntityKind::Ref, word(), LanguageCode("en")},
                   .hyp = {EntityKind::Hypo, word(), LanguageCode("en")},
                   .trans1 = std::nullopt,
                   .trans2 = std::nullopt,
                   .human = std::nullopt};
    switch (rng.next() % 3) {
      case 0: ex.human = DirectAssessment{rng.uniform() * 200 - 100}; break;
      case 1: ex.human = RelativeRanking{ex.hyp, {EntityKind::Hypo, ex.hyp.text + " x", ex.hyp.lang}}; break;
      default: break;
    }
    if (rng.next() % 2) ex.trans1 = Entity{EntityKind::Trans1, word(), LanguageCode("es")};
    if (rng.next() % 2) ex.trans2 = Entity{EntityKind::Trans2, word(), LanguageCode("fr")};
    const auto once = serialize_example(ex);
    std::istringstream in(once);
    const auto back = parse_dataset(in, "mem");
    REQUIRE(back.size() == 1);
    CHECK(serialize_example(back[0]) == once);
  }
}

TEST_CASE("relative-ranking examples expand into better/worse segments") {
  const auto segs = expand_segments(parse(kThreeRecords));
  REQUIRE(segs.size() == 4);
  CHECK(segs[0].id == "a");
  CHECK(segs[1].id == "b#better");
  CHECK(segs[1].hyp.text == "the dog");
  CHECK(segs[2].id == "b#worse");
  CHECK(segs[2].hyp.text == "dog the");
  CHECK(segs[2].example_index == 1);
  CHECK(segs[3].id == "c");
}

TEST_CASE("content hash is FNV-1a 64") {
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("xoshiro256** matches its reference stream") {
  // splitmix64(0) seeding; first outputs computed with the published C reference.
  Xoshiro256StarStar rng(0);
  std::uint64_t state = 0;
  std::uint64_t s[4];
  for (auto& w : s) w = Xoshiro256StarStar::splitmix64(state);
  const auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t expected = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    CHECK(rng.next() == expected);
  }
  std::uint64_t zero = 0;
  CHECK(Xoshiro256StarStar::splitmix64(zero) == 0xe220a8397b1dcdafULL);
}
