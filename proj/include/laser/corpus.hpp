#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace laser {

enum class Pos { Noun, Verb, Adj, Other };

std::string_view to_string(Pos pos);

// Accepts the canonical names (NOUN, VERB, ADJ, OTHER) case-insensitively,
// WordNet letters (n, v, a, s) and Penn-style tags (NN*, VB*, JJ*). Anything
// else maps to Other.
Pos parse_pos(std::string_view text);

// One token instance. occ_id is the row index into every layer matrix.
struct Occurrence {
  int occ_id = 0;
  std::string corpus_id;
  int sentence_idx = 0;
  int token_idx = 0;
  std::string surface;
  std::string lemma;
  Pos pos = Pos::Other;
  std::optional<std::string> sense_key;
  int frequency_rank = 0;

  bool operator==(const Occurrence&) const = default;
};

enum class CorpusFormat { Tsv, UfsacXml };

// Loads a corpus file. Occurrences come back in document order with dense
// occ_ids and lemma frequency ranks computed over the file. For UFSAC input
// the corpus id is the file stem unless `corpus_id` is given.
std::vector<Occurrence> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    std::optional<std::string> corpus_id = std::nullopt);

std::vector<Occurrence> parse_tsv(std::istream& in);
std::vector<Occurrence> parse_ufsac(std::istream& in, const std::string& corpus_id);

// Writes the header plus one row per occurrence. occ_id and frequency_rank
// are implied by row order and recomputed on load.
void write_tsv(std::ostream& out, const std::vector<Occurrence>& occs);

// Rank lemmas by descending count, ties broken lexicographically; rank 1 is
// the most frequent. Overwrites frequency_rank in place.
void assign_frequency_ranks(std::vector<Occurrence>& occs);

// Sense-annotated, multi-sense-filtered view over an occurrence table.
struct SenseInventory {
  std::map<std::string, std::set<std::string>> by_lemma;
  std::map<std::string, std::vector<int>> by_sense;  // occ_ids ascending
  std::map<std::string, int> m_counts;
  std::map<std::string, std::string> lemma_of_sense;
  // Occurrences whose sense key was already claimed by a different lemma.
  std::vector<int> conflicting;

  // A sense takes part in SenSim only if it has at least one pair.
  bool sensim_eligible(const std::string& sense_key) const;
  std::size_t retained_count() const;
  std::vector<int> retained_ids() const;

  bool operator==(const SenseInventory&) const = default;
};

SenseInventory build_inventory(const std::vector<Occurrence>& occs, const std::set<Pos>& restrict_pos);

inline const std::set<Pos> kContentPos = {Pos::Noun, Pos::Verb, Pos::Adj};

// The subset of `occs` retained by `inv`, in the original order.
std::vector<Occurrence> retained_occurrences(const std::vector<Occurrence>& occs,
                                             const SenseInventory& inv);

// Per-POS counts reported both as lemma types and as occurrences, since
// either reading of a corpus summary table may be wanted.
struct PosSummary {
  std::map<Pos, int> lemma_types;
  std::map<Pos, int> occurrences;
};

PosSummary summarize_by_pos(const std::vector<Occurrence>& occs, const SenseInventory& inv);

}  // namespace laser
