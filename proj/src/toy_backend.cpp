#include "datscore/toy_backend.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "datscore/dataset.hpp"
#include "datscore/errors.hpp"
#include "datscore/stats.hpp"

namespace datscore {

const ToyCorpus& fixture_corpus() {
  static const ToyCorpus corpus{{
      {{"en", "the cat sleeps on the mat"},
       {"fr", "le chat dort sur le tapis"},
       {"es", "el gato duerme en la alfombra"}},
      {{"en", "the dog eats the bread"},
       {"fr", "le chien mange le pain"},
       {"es", "el perro come el pan"}},
      {{"en", "a small house near the river"},
       {"fr", "une petite maison près de la rivière"},
       {"es", "una casa pequeña cerca del río"}},
      {{"en", "i drink cold water"},
       {"fr", "je bois de l'eau froide"},
       {"es", "yo bebo agua fría"}},
      {{"en", "the children play in the garden"},
       {"fr", "les enfants jouent dans le jardin"},
       {"es", "los niños juegan en el jardín"}},
      {{"en", "she reads a book every day"},
       {"fr", "elle lit un livre chaque jour"},
       {"es", "ella lee un libro cada día"}},
      {{"en", "we go to the market tomorrow"},
       {"fr", "nous allons au marché demain"},
       {"es", "vamos al mercado mañana"}},
      {{"en", "the sun is hot today"},
       {"fr", "le soleil est chaud aujourd'hui"},
       {"es", "el sol está caliente hoy"}},
  }};
  return corpus;
}

std::vector<std::string> toy_tokenize(std::string_view text) {
  std::string lowered(text);
  for (auto& c : lowered) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  std::istringstream in(lowered);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

Eigen::Index ToyBackend::Vocab::lookup(const std::string& token) const {
  if (auto it = index.find(token); it != index.end()) return it->second;
  return index.at(kUnknownToken);
}

ToyBackend::ToyBackend(ToyCorpus corpus, double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::Contract, "toy backend lambda must lie in [0, 1]");
  }
  if (corpus.entries.empty()) throw Error(ErrorCode::Contract, "toy corpus is empty");

  std::set<std::string> langs;
  for (const auto& entry : corpus.entries) {
    for (const auto& [lang, sentence] : entry) langs.insert(lang);
  }

  std::ostringstream fingerprint;
  for (const auto& entry : corpus.entries) {
    for (const auto& [lang, sentence] : entry) fingerprint << lang << '\t' << sentence << '\n';
    fingerprint << '\n';
  }
  corpus_hash_ = content_hash(fingerprint.str());

  for (const auto& lang : langs) {
    std::set<std::string> words{kUnknownToken};
    for (const auto& entry : corpus.entries) {
      if (auto it = entry.find(lang); it != entry.end()) {
        for (auto& tok : toy_tokenize(it->second)) words.insert(std::move(tok));
      }
    }
    Vocab v;
    v.tokens.assign(words.begin(), words.end());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.tokens.size()); ++i) {
      v.index.emplace(v.tokens[static_cast<std::size_t>(i)], i);
    }
    vocabs_.emplace(lang, std::move(v));
  }

  const auto bag = [](const Vocab& v, const std::string& sentence) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v.tokens.size()));
    for (const auto& tok : toy_tokenize(sentence)) counts(v.lookup(tok)) += 1.0;
    return counts;
  };

  for (const auto& in : langs) {
    for (const auto& out : langs) {
      const auto& vin = vocabs_.at(in);
      const auto& vout = vocabs_.at(out);
      Eigen::MatrixXd cooc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vin.tokens.size()),
                                                   static_cast<Eigen::Index>(vout.tokens.size()));
      for (const auto& entry : corpus.entries) {
        auto a = entry.find(in);
        auto b = entry.find(out);
        if (a == entry.end() || b == entry.end()) continue;
        cooc.noalias() += bag(vin, a->second) * bag(vout, b->second).transpose();
      }
      cooc.array() += 1.0;
      const Eigen::VectorXd row_sums = cooc.rowwise().sum();
      cooc = row_sums.cwiseInverse().asDiagonal() * cooc;
      tables_.emplace(std::make_pair(in, out), std::move(cooc));
    }
  }
}

bool ToyBackend::supports(const LanguageCode& lang) const { return vocabs_.contains(lang.str()); }

const ToyBackend::Vocab& ToyBackend::vocab(const LanguageCode& lang) const {
  auto it = vocabs_.find(lang.str());
  if (it == vocabs_.end()) {
    throw Error(ErrorCode::UnsupportedLanguage, "toy backend does not support '" + lang.str() + "'");
  }
  return it->second;
}

const std::vector<std::string>& ToyBackend::vocabulary(const LanguageCode& lang) const {
  return vocab(lang).tokens;
}

const Eigen::MatrixXd& ToyBackend::lexical_table(const LanguageCode& in,
                                                 const LanguageCode& out) const {
  vocab(in);
  vocab(out);
  return tables_.at({in.str(), out.str()});
}

Eigen::VectorXd ToyBackend::step_distribution(std::string_view input_text, const LanguageCode& in,
                                              const LanguageCode& out) const {
  const auto tokens = toy_tokenize(input_text);
  if (tokens.empty()) throw Error(ErrorCode::EmptyInput, "toy backend: empty input text");
  const auto& vin = vocab(in);
  const auto& table = lexical_table(in, out);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(table.cols());
  for (const auto& tok : tokens) mean += table.row(vin.lookup(tok)).transpose();
  mean /= static_cast<double>(tokens.size());

  const double v = static_cast<double>(table.cols());
  return (lambda_ * mean.array() + (1.0 - lambda_) / v).matrix();
}

TokenTrace ToyBackend::forced_score(const ScoreRequest& request) const {
  const auto outputs = toy_tokenize(request.output_text);
  if (outputs.empty()) throw Error(ErrorCode::EmptyInput, "toy backend: empty output text");
  const auto& vout = vocab(request.output_lang);
  const Eigen::VectorXd dist =
      step_distribution(request.input_text, request.input_lang, request.output_lang);
  const double entropy = stats::entropy_nats(dist);

  const auto m = static_cast<Eigen::Index>(outputs.size());
  TokenTrace trace{outputs, Eigen::VectorXd(m), Eigen::VectorXd::Constant(m, entropy)};
  for (Eigen::Index t = 0; t < m; ++t) {
    trace.logprobs(t) = std::log(dist(vout.lookup(outputs[static_cast<std::size_t>(t)])));
  }
  return trace;
}

std::string ToyBackend::translate(const std::string& text, const LanguageCode& src_lang,
                                  const LanguageCode& tgt_lang) const {
  const auto& vin = vocab(src_lang);
  const auto& vout = vocab(tgt_lang);
  if (src_lang == tgt_lang) return text;
  const auto tokens = toy_tokenize(text);
  if (tokens.empty()) throw Error(ErrorCode::EmptyInput, "toy backend: empty text to translate");

  const auto& table = lexical_table(src_lang, tgt_lang);
  const Eigen::Index unk = vout.index.at(kUnknownToken);
  std::string out;
  for (const auto& tok : tokens) {
    const auto row = table.row(vin.lookup(tok));
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (j == unk) continue;
      if (best < 0 || row(j) > row(best)) best = j;
    }
    if (!out.empty()) out += ' ';
    out += vout.tokens[static_cast<std::size_t>(best < 0 ? unk : best)];
  }
  return out;
}

std::string ToyBackend::identity() const {
  std::ostringstream id;
  id << "toy:lambda=" << lambda_ << ":corpus=" << corpus_hash_;
  return id.str();
}

}  // namespace datscore
