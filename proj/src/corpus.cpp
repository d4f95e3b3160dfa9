#include "laser/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "laser/error.hpp"

namespace laser {

namespace {

const char* const kTsvHeader = "corpus_id\tsentence_idx\ttoken_idx\tsurface\tlemma\tpos\tsense_key";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int parse_index(std::string_view text, const char* what, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw DataError("line " + std::to_string(line_no) + ": invalid " + what + " '" +
                    std::string(text) + "'");
  }
  return value;
}

void check_unique_positions(const std::vector<Occurrence>& occs, const std::vector<std::size_t>& line_of) {
  std::map<std::tuple<std::string, int, int>, std::size_t> seen;
  for (std::size_t i = 0; i < occs.size(); ++i) {
    const auto& o = occs[i];
    auto [it, inserted] = seen.emplace(std::tuple(o.corpus_id, o.sentence_idx, o.token_idx), line_of[i]);
    if (!inserted) {
      throw DataError("line " + std::to_string(line_of[i]) + ": duplicate position (" + o.corpus_id +
                      ", " + std::to_string(o.sentence_idx) + ", " + std::to_string(o.token_idx) +
                      "), first seen on line " + std::to_string(it->second));
    }
  }
}

void finalize(std::vector<Occurrence>& occs) {
  for (std::size_t i = 0; i < occs.size(); ++i) occs[i].occ_id = static_cast<int>(i);
  assign_frequency_ranks(occs);
}

// Minimal attribute scanner for UFSAC-style <word .../> elements.
std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos) {
      out += s[i];
      continue;
    }
    const std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else {
      out += s.substr(i, semi - i + 1);
    }
    i = semi;
  }
  return out;
}

std::map<std::string, std::string> parse_attributes(std::string_view tag, std::size_t line_no) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < tag.size()) {
    while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/')) ++i;
    if (i >= tag.size()) break;
    const std::size_t eq = tag.find('=', i);
    if (eq == std::string_view::npos) {
      throw DataError("line " + std::to_string(line_no) + ": malformed attribute in <word>");
    }
    std::string name(tag.substr(i, eq - i));
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    std::size_t q = eq + 1;
    while (q < tag.size() && std::isspace(static_cast<unsigned char>(tag[q]))) ++q;
    if (q >= tag.size() || (tag[q] != '"' && tag[q] != '\'')) {
      throw DataError("line " + std::to_string(line_no) + ": unquoted attribute '" + name + "'");
    }
    const char quote = tag[q];
    const std::size_t end = tag.find(quote, q + 1);
    if (end == std::string_view::npos) {
      throw DataError("line " + std::to_string(line_no) + ": unterminated attribute '" + name + "'");
    }
    attrs[name] = decode_entities(tag.substr(q + 1, end - q - 1));
    i = end + 1;
  }
  return attrs;
}

}  // namespace

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Adj: return "ADJ";
    case Pos::Other: return "OTHER";
  }
  return "OTHER";
}

Pos parse_pos(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "NOUN" || upper == "N" || upper.starts_with("NN")) return Pos::Noun;
  if (upper == "VERB" || upper == "V" || upper.starts_with("VB")) return Pos::Verb;
  if (upper == "ADJ" || upper == "A" || upper == "S" || upper.starts_with("JJ")) return Pos::Adj;
  return Pos::Other;
}

std::vector<Occurrence> parse_tsv(std::istream& in) {
  std::vector<Occurrence> occs;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.empty()) continue;
      if (line != kTsvHeader) {
        throw DataError("line " + std::to_string(line_no) + ": expected header '" + kTsvHeader + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 7) {
      throw DataError("line " + std::to_string(line_no) + ": expected 7 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    Occurrence o;
    o.corpus_id = std::string(fields[0]);
    if (o.corpus_id.empty()) throw DataError("line " + std::to_string(line_no) + ": empty corpus_id");
    o.sentence_idx = parse_index(fields[1], "sentence_idx", line_no);
    o.token_idx = parse_index(fields[2], "token_idx", line_no);
    o.surface = std::string(fields[3]);
    o.lemma = std::string(fields[4]);
    if (o.lemma.empty()) throw DataError("line " + std::to_string(line_no) + ": empty lemma");
    o.pos = parse_pos(fields[5]);
    if (!fields[6].empty()) o.sense_key = std::string(fields[6]);
    occs.push_back(std::move(o));
    line_of.push_back(line_no);
  }
  check_unique_positions(occs, line_of);
  finalize(occs);
  return occs;
}

std::vector<Occurrence> parse_ufsac(std::istream& in, const std::string& corpus_id) {
  std::vector<Occurrence> occs;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;
  int sentence = -1;
  int token = 0;
  bool in_sentence = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = 0;
    while ((pos = line.find('<', pos)) != std::string::npos) {
      const std::size_t close = line.find('>', pos);
      if (close == std::string::npos) {
        throw DataError("line " + std::to_string(line_no) + ": tag not closed on the same line");
      }
      const std::string_view tag(line.data() + pos + 1, close - pos - 1);
      if (tag.starts_with("sentence")) {
        in_sentence = true;
        ++sentence;
        token = 0;
      } else if (tag.starts_with("/sentence")) {
        in_sentence = false;
      } else if (tag.starts_with("word") && (tag.size() == 4 || std::isspace(static_cast<unsigned char>(tag[4])) || tag[4] == '/')) {
        if (!in_sentence) {
          throw DataError("line " + std::to_string(line_no) + ": <word> outside <sentence>");
        }
        auto attrs = parse_attributes(tag.substr(4), line_no);
        Occurrence o;
        o.corpus_id = corpus_id;
        o.sentence_idx = sentence;
        o.token_idx = token++;
        o.surface = attrs["surface_form"];
        o.lemma = attrs.count("lemma") ? attrs["lemma"] : o.surface;
        if (o.lemma.empty()) {
          throw DataError("line " + std::to_string(line_no) + ": <word> without surface_form or lemma");
        }
        o.pos = parse_pos(attrs["pos"]);
        if (auto it = attrs.find("wn30_key"); it != attrs.end() && !it->second.empty()) {
          // Multiple candidate keys are ';'-separated; the first is kept.
          o.sense_key = it->second.substr(0, it->second.find(';'));
        }
        occs.push_back(std::move(o));
        line_of.push_back(line_no);
      }
      pos = close + 1;
    }
  }
  check_unique_positions(occs, line_of);
  finalize(occs);
  return occs;
}

std::vector<Occurrence> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    std::optional<std::string> corpus_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  if (format == CorpusFormat::Tsv) return parse_tsv(in);
  return parse_ufsac(in, corpus_id.value_or(path.stem().string()));
}

void write_tsv(std::ostream& out, const std::vector<Occurrence>& occs) {
  out << kTsvHeader << '\n';
  for (const auto& o : occs) {
    out << o.corpus_id << '\t' << o.sentence_idx << '\t' << o.token_idx << '\t' << o.surface << '\t'
        << o.lemma << '\t' << to_string(o.pos) << '\t' << o.sense_key.value_or("") << '\n';
  }
}

void assign_frequency_ranks(std::vector<Occurrence>& occs) {
  std::map<std::string, int> counts;
  for (const auto& o : occs) ++counts[o.lemma];
  std::vector<std::pair<std::string, int>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::unordered_map<std::string, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].first] = static_cast<int>(i) + 1;
  for (auto& o : occs) o.frequency_rank = rank[o.lemma];
}

bool SenseInventory::sensim_eligible(const std::string& sense_key) const {
  const auto it = m_counts.find(sense_key);
  return it != m_counts.end() && it->second >= 2;
}

std::size_t SenseInventory::retained_count() const {
  std::size_t n = 0;
  for (const auto& [key, m] : m_counts) n += static_cast<std::size_t>(m);
  return n;
}

std::vector<int> SenseInventory::retained_ids() const {
  std::vector<int> ids;
  for (const auto& [key, list] : by_sense) ids.insert(ids.end(), list.begin(), list.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

SenseInventory build_inventory(const std::vector<Occurrence>& occs, const std::set<Pos>& restrict_pos) {
  // Candidate senses keyed by sense key; a key belongs to the first lemma seen with it.
  std::map<std::string, std::string> owner;
  std::map<std::string, std::vector<int>> members;
  std::vector<int> conflicting;
  for (const auto& o : occs) {
    if (!o.sense_key || !restrict_pos.contains(o.pos)) continue;
    auto [it, inserted] = owner.emplace(*o.sense_key, o.lemma);
    if (!inserted && it->second != o.lemma) {
      conflicting.push_back(o.occ_id);
      continue;
    }
    members[*o.sense_key].push_back(o.occ_id);
  }

  std::map<std::string, std::set<std::string>> senses_of;
  for (const auto& [key, lemma] : owner) {
    if (members.contains(key)) senses_of[lemma].insert(key);
  }

  SenseInventory inv;
  inv.conflicting = std::move(conflicting);
  for (auto& [lemma, senses] : senses_of) {
    if (senses.size() < 2) continue;
    for (const auto& key : senses) {
      auto ids = members[key];
      std::sort(ids.begin(), ids.end());
      inv.m_counts[key] = static_cast<int>(ids.size());
      inv.lemma_of_sense[key] = lemma;
      inv.by_sense[key] = std::move(ids);
    }
    inv.by_lemma[lemma] = senses;
  }
  return inv;
}

std::vector<Occurrence> retained_occurrences(const std::vector<Occurrence>& occs, const SenseInventory& inv) {
  std::vector<bool> keep(occs.size(), false);
  for (const int id : inv.retained_ids()) {
    if (id >= 0 && static_cast<std::size_t>(id) < keep.size()) keep[static_cast<std::size_t>(id)] = true;
  }
  std::vector<Occurrence> out;
  for (const auto& o : occs) {
    if (o.occ_id >= 0 && static_cast<std::size_t>(o.occ_id) < keep.size() && keep[static_cast<std::size_t>(o.occ_id)]) {
      out.push_back(o);
    }
  }
  return out;
}

PosSummary summarize_by_pos(const std::vector<Occurrence>& occs, const SenseInventory& inv) {
  PosSummary summary;
  std::map<Pos, std::set<std::string>> lemmas;
  std::unordered_map<int, const Occurrence*> by_id;
  for (const auto& o : occs) by_id[o.occ_id] = &o;
  for (const int id : inv.retained_ids()) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    ++summary.occurrences[it->second->pos];
    lemmas[it->second->pos].insert(it->second->lemma);
  }
  for (const auto& [pos, set] : lemmas) summary.lemma_types[pos] = static_cast<int>(set.size());
  return summary;
}

}  // namespace laser
