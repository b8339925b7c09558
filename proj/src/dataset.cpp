#include "datscore/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "datscore/errors.hpp"
#include "json.hpp"

namespace datscore {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "id",     "src",       "src_lang",    "ref",    "hyp",        "hyp_better",
      "hyp_worse", "tgt_lang", "human",     "trans1", "trans1_lang", "trans2",
      "trans2_lang"};
  return fields;
}

class RecordReader {
 public:
  RecordReader(const json& obj, std::string_view source, std::size_t line)
      : obj_(obj), source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(std::string(source_), line_, message);
  }

  bool has(const char* key) const { return obj_.contains(key); }

  std::string text(const char* key) const {
    if (!obj_.contains(key)) fail(std::string("missing field \"") + key + "\"");
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
  }

  LanguageCode lang(const char* key) const {
    auto code = text(key);
    if (!LanguageCode::is_valid(code)) {
      fail(std::string("field \"") + key + "\" is not a language code: '" + code + "'");
    }
    return LanguageCode(code);
  }

  double number(const char* key) const {
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
  }

 private:
  const json& obj_;
  std::string_view source_;
  std::size_t line_;
};

EvalExample parse_record(const json& obj, std::string_view source, std::size_t line) {
  RecordReader r(obj, source, line);
  if (!obj.is_object()) r.fail("record is not a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!known_fields().contains(key)) r.fail("unknown field \"" + key + "\"");
  }

  const auto tgt = r.lang("tgt_lang");
  EvalExample ex{
      .id = r.text("id"),
      .src = {EntityKind::Src, trim(r.text("src")), r.lang("src_lang")},
      .ref = {EntityKind::Ref, trim(r.text("ref")), tgt},
      .hyp = {EntityKind::Hypo, "", tgt},
      .trans1 = std::nullopt,
      .trans2 = std::nullopt,
      .human = std::nullopt,
  };

  const bool rr = r.has("hyp_better") || r.has("hyp_worse");
  if (rr) {
    if (r.has("hyp")) r.fail("record mixes \"hyp\" with \"hyp_better\"/\"hyp_worse\"");
    if (r.has("human")) r.fail("relative-ranking record must not carry \"human\"");
    Entity better{EntityKind::Hypo, trim(r.text("hyp_better")), tgt};
    Entity worse{EntityKind::Hypo, trim(r.text("hyp_worse")), tgt};
    ex.hyp = better;
    ex.human = RelativeRanking{std::move(better), std::move(worse)};
  } else {
    ex.hyp.text = trim(r.text("hyp"));
    if (r.has("human")) ex.human = DirectAssessment{r.number("human")};
  }

  const auto optional_entity = [&](const char* text_key, const char* lang_key,
                                   EntityKind kind) -> std::optional<Entity> {
    const bool has_text = r.has(text_key);
    if (has_text != r.has(lang_key)) {
      r.fail(std::string("\"") + text_key + "\" and \"" + lang_key + "\" must appear together");
    }
    if (!has_text) return std::nullopt;
    return Entity{kind, trim(r.text(text_key)), r.lang(lang_key)};
  };
  ex.trans1 = optional_entity("trans1", "trans1_lang", EntityKind::Trans1);
  ex.trans2 = optional_entity("trans2", "trans2_lang", EntityKind::Trans2);
  return ex;
}

}  // namespace

std::vector<EvalExample> parse_dataset(std::istream& in, std::string_view source_name) {
  std::vector<EvalExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(source_name), line_no, std::string("invalid JSON: ") + e.what());
    }
    out.push_back(parse_record(obj, source_name, line_no));
  }
  return out;
}

std::vector<EvalExample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

std::string serialize_example(const EvalExample& ex) {
  ordered_json obj;
  obj["id"] = ex.id;
  obj["src"] = ex.src.text;
  obj["src_lang"] = ex.src.lang.str();
  obj["ref"] = ex.ref.text;
  if (ex.is_relative_ranking()) {
    const auto& rr = std::get<RelativeRanking>(*ex.human);
    obj["hyp_better"] = rr.better.text;
    obj["hyp_worse"] = rr.worse.text;
    obj["tgt_lang"] = ex.hyp.lang.str();
  } else {
    obj["hyp"] = ex.hyp.text;
    obj["tgt_lang"] = ex.hyp.lang.str();
    if (ex.is_direct_assessment()) obj["human"] = std::get<DirectAssessment>(*ex.human).score;
  }
  if (ex.trans1) {
    obj["trans1"] = ex.trans1->text;
    obj["trans1_lang"] = ex.trans1->lang.str();
  }
  if (ex.trans2) {
    obj["trans2"] = ex.trans2->text;
    obj["trans2_lang"] = ex.trans2->lang.str();
  }
  return obj.dump();
}

void write_dataset(std::ostream& out, std::span<const EvalExample> examples) {
  for (const auto& ex : examples) out << serialize_example(ex) << '\n';
}

void write_dataset(const std::filesystem::path& path, std::span<const EvalExample> examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path.string() + "'");
  write_dataset(out, examples);
}

ValidationReport validate_dataset(std::span<const EvalExample> examples) {
  ValidationReport report;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const auto flag = [&](std::string message) {
      report.violations.push_back({ex.id, i, std::move(message)});
    };
    if (ex.id.empty()) flag("empty id");
    if (!seen.insert(ex.id).second) flag("duplicate id");
    if (ex.ref.lang != ex.hyp.lang) flag("reference and hypothesis languages differ");

    const auto check_text = [&](const Entity& e) {
      if (trim(e.text).empty()) flag("empty entity text (" + std::string(to_string(e.kind)) + ")");
    };
    check_text(ex.src);
    check_text(ex.ref);
    check_text(ex.hyp);
    if (ex.trans1) check_text(*ex.trans1);
    if (ex.trans2) check_text(*ex.trans2);

    if (ex.is_direct_assessment() && !std::isfinite(std::get<DirectAssessment>(*ex.human).score)) {
      flag("non-finite direct assessment score");
    }
    if (ex.is_relative_ranking()) {
      const auto& rr = std::get<RelativeRanking>(*ex.human);
      check_text(rr.worse);
      if (rr.better.text == rr.worse.text) flag("relative ranking hypotheses are identical");
    }
  }
  return report;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return content_hash(buf.str());
}

}  // namespace datscore
