#include "datscore/trace_store.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "datscore/dataset.hpp"
#include "datscore/errors.hpp"
#include "json.hpp"

namespace datscore {
namespace {

using nlohmann::json;

Eigen::VectorXd to_vector(const json& array) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(array.size()));
  for (std::size_t i = 0; i < array.size(); ++i) {
    if (!array[i].is_number()) throw std::invalid_argument("non-numeric array entry");
    v(static_cast<Eigen::Index>(i)) = array[i].get<double>();
  }
  return v;
}

}  // namespace

TraceStore TraceStore::parse(std::istream& in, std::string_view source_name,
                             std::optional<std::size_t> vocab_size) {
  TraceStore store;
  std::string line;
  std::size_t line_no = 0;
  const std::string source(source_name);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    TraceKey key{"", {}};
    TokenTrace trace;
    try {
      const auto obj = json::parse(line);
      if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
      key.example_id = obj.at("example_id").get<std::string>();
      key.direction = {parse_entity_kind(obj.at("from").get<std::string>()),
                       parse_entity_kind(obj.at("to").get<std::string>())};
      if (key.direction.from == key.direction.to) throw std::invalid_argument("from == to");
      trace.tokens = obj.at("tokens").get<std::vector<std::string>>();
      trace.logprobs = to_vector(obj.at("logprobs"));
      trace.entropies = to_vector(obj.at("entropies"));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, std::string("malformed trace record: ") + e.what());
    }
    try {
      validate_trace(trace, vocab_size);
      store.insert(std::move(key), std::move(trace));
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return store;
}

TraceStore TraceStore::load(const std::filesystem::path& path,
                            std::optional<std::size_t> vocab_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open trace file '" + path.string() + "'");
  return parse(in, path.string(), vocab_size);
}

void TraceStore::insert(TraceKey key, TokenTrace trace) {
  validate_trace(trace);
  const auto name = key.example_id + " " + key.direction.name();
  if (!traces_.emplace(std::move(key), std::move(trace)).second) {
    throw Error(ErrorCode::Validation, "duplicate trace key (" + name + ")");
  }
}

const TokenTrace* TraceStore::find(const TraceKey& key) const {
  auto it = traces_.find(key);
  return it == traces_.end() ? nullptr : &it->second;
}

std::string serialize_trace_record(const TraceKey& key, const TokenTrace& trace) {
  nlohmann::ordered_json obj;
  obj["example_id"] = key.example_id;
  obj["from"] = std::string(to_string(key.direction.from));
  obj["to"] = std::string(to_string(key.direction.to));
  obj["tokens"] = trace.tokens;
  obj["logprobs"] = std::vector<double>(trace.logprobs.begin(), trace.logprobs.end());
  obj["entropies"] = std::vector<double>(trace.entropies.begin(), trace.entropies.end());
  return obj.dump();
}

void TraceStore::write(std::ostream& out) const {
  for (const auto& [key, trace] : traces_) out << serialize_trace_record(key, trace) << '\n';
}

void TraceStore::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path.string() + "'");
  write(out);
}

TraceBackend::TraceBackend(TraceStore store, std::string identity)
    : store_(std::move(store)), identity_(std::move(identity)) {}

TraceBackend TraceBackend::from_file(const std::filesystem::path& path,
                                     std::optional<std::size_t> vocab_size) {
  auto store = TraceStore::load(path, vocab_size);
  return TraceBackend(std::move(store), "trace:" + path.string() + ":" + file_content_hash(path));
}

TokenTrace TraceBackend::forced_score(const ScoreRequest& request) const {
  if (!request.key) {
    throw Error(ErrorCode::MissingTrace, "trace backend needs an (example, direction) key");
  }
  const auto* trace = store_.find(*request.key);
  if (!trace) {
    throw Error(ErrorCode::MissingTrace, "no trace for (" + request.key->example_id + ", " +
                                             request.key->direction.name() + ")");
  }
  return *trace;
}

std::string TraceBackend::translate(const std::string&, const LanguageCode&,
                                    const LanguageCode&) const {
  throw Error(ErrorCode::TranslateUnsupported, "trace backend holds scores only; cannot translate");
}

}  // namespace datscore
