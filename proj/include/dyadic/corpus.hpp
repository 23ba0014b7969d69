#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dyadic {

enum class Agent { User, Ai };
enum class Dataset { Field, Simulated };
enum class Genre { Cartoon, Fantasy, SciFi, Unknown };

std::string_view to_string(Agent a);
std::string_view to_string(Dataset d);
std::string_view to_string(Genre g);
Agent parse_agent(std::string_view s);  // "user" | "ai", case-insensitive
Dataset parse_dataset(std::string_view s);
Genre parse_genre(std::string_view s);

struct Turn {
  std::string story_id;
  std::string session_id;
  int turn_index = 0;  // 0-based position within the story
  Agent agent = Agent::User;
  std::string text;
  std::size_t char_count = 0;  // code points in text
  std::string timestamp;       // optional, empty when absent

  bool operator==(const Turn&) const = default;
};

Turn make_turn(std::string story_id, std::string session_id, int turn_index, Agent agent,
               std::string text);

// One user turn and the AI reply that follows it.
struct Interaction {
  int interaction_index = 0;
  Turn user_turn;
  Turn ai_turn;

  bool operator==(const Interaction&) const = default;
};

// A participant's contiguous run of interactions within one story.
struct Session {
  std::string session_id;
  std::string story_id;
  int first_interaction = 0;
  int length = 0;

  int end_interaction() const { return first_interaction + length; }
  bool operator==(const Session&) const = default;
};

struct Story {
  std::string story_id;
  Dataset dataset = Dataset::Field;
  Genre genre = Genre::Unknown;
  std::vector<Interaction> interactions;
  std::vector<Session> sessions;

  bool operator==(const Story&) const = default;
};

struct Provenance {
  std::string source_path;
  std::string ingested_at;  // ISO-8601 UTC
};

// Immutable after construction; safe to share across readers.
struct Corpus {
  std::vector<Story> stories;
  Dataset dataset = Dataset::Field;
  Provenance provenance;

  std::size_t interaction_count() const;
  const Story* find_story(std::string_view story_id) const;
};

// Identifies a turn across the corpus.
struct TurnKey {
  std::string story_id;
  int turn_index = 0;

  auto operator<=>(const TurnKey&) const = default;
  bool operator==(const TurnKey&) const = default;
};

inline TurnKey key_of(const Turn& t) { return TurnKey{t.story_id, t.turn_index}; }

struct LoadOptions {
  // Drop a story's final user turn when it has no AI reply instead of failing.
  bool drop_trailing_user_turn = false;
};

// Groups turns into interactions, sessions and stories. Turns may arrive in any
// order; they are sorted by (story_id, turn_index). Throws MalformedRecord,
// AlternationViolation or OrphanTurn.
Corpus build_corpus(std::vector<Turn> turns, Dataset dataset, const LoadOptions& options = {});

// Line-delimited JSON records: story_id, session_id, turn_index, agent, text and
// optional genre / timestamp. Blank lines are ignored.
Corpus load_transcripts(std::istream& in, Dataset dataset, const LoadOptions& options = {});
Corpus load_transcripts(const std::filesystem::path& path, Dataset dataset,
                        const LoadOptions& options = {});

void write_transcripts(const Corpus& corpus, std::ostream& out);

struct StoryViolations {
  std::string story_id;
  int under_length = 0;  // non-empty user turns shorter than the minimum
  int empty = 0;         // turns whose text is empty or whitespace only
  int alternation = 0;   // turns out of (USER, AI)* order or off-index

  int total() const { return under_length + empty + alternation; }
};

struct ValidationReport {
  std::vector<StoryViolations> stories;

  int total_under_length() const;
  int total_empty() const;
  int total_alternation() const;
};

inline constexpr std::size_t kMinUserChars = 20;

ValidationReport validate_corpus(const Corpus& corpus, std::size_t min_user_chars = kMinUserChars);

std::map<std::string, int> session_lengths(const Corpus& corpus);

}  // namespace dyadic
