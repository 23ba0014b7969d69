#include "dyadic/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

using nlohmann::json;

std::string_view to_string(Agent a) { return a == Agent::User ? "user" : "ai"; }

std::string_view to_string(Dataset d) { return d == Dataset::Field ? "field" : "simulated"; }

std::string_view to_string(Genre g) {
  switch (g) {
    case Genre::Cartoon: return "cartoon";
    case Genre::Fantasy: return "fantasy";
    case Genre::SciFi: return "scifi";
    case Genre::Unknown: return "unknown";
  }
  return "unknown";
}

Agent parse_agent(std::string_view s) {
  auto l = text::lower(s);
  if (l == "user") return Agent::User;
  if (l == "ai") return Agent::Ai;
  throw Error(Errc::MalformedRecord, "unknown agent '" + std::string(s) + "'");
}

Dataset parse_dataset(std::string_view s) {
  auto l = text::lower(s);
  if (l == "field") return Dataset::Field;
  if (l == "simulated" || l == "sim") return Dataset::Simulated;
  throw Error(Errc::ConfigInvalid, "unknown dataset '" + std::string(s) + "'");
}

Genre parse_genre(std::string_view s) {
  auto l = text::lower(s);
  if (l == "cartoon") return Genre::Cartoon;
  if (l == "fantasy") return Genre::Fantasy;
  if (l == "scifi" || l == "sci-fi" || l == "science fiction") return Genre::SciFi;
  return Genre::Unknown;
}

Turn make_turn(std::string story_id, std::string session_id, int turn_index, Agent agent,
               std::string text) {
  Turn t;
  t.story_id = std::move(story_id);
  t.session_id = std::move(session_id);
  t.turn_index = turn_index;
  t.agent = agent;
  t.char_count = text::code_point_length(text);
  t.text = std::move(text);
  return t;
}

std::size_t Corpus::interaction_count() const {
  std::size_t n = 0;
  for (const auto& s : stories) n += s.interactions.size();
  return n;
}

const Story* Corpus::find_story(std::string_view story_id) const {
  for (const auto& s : stories)
    if (s.story_id == story_id) return &s;
  return nullptr;
}

namespace {

struct Record {
  Turn turn;
  Genre genre = Genre::Unknown;
  long line = 0;  // 0 when built programmatically
};

std::string where(const Record& r) {
  std::string s = "story '" + r.turn.story_id + "' turn " + std::to_string(r.turn.turn_index);
  if (r.line > 0) s += " (line " + std::to_string(r.line) + ")";
  return s;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Corpus build_from_records(std::vector<Record> records, Dataset dataset,
                          const LoadOptions& options) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    if (a.turn.story_id != b.turn.story_id) return a.turn.story_id < b.turn.story_id;
    return a.turn.turn_index < b.turn.turn_index;
  });

  Corpus corpus;
  corpus.dataset = dataset;
  std::set<std::string> seen_sessions;

  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].turn.story_id == records[i].turn.story_id) ++j;

    Story story;
    story.story_id = records[i].turn.story_id;
    story.dataset = dataset;
    for (std::size_t k = i; k < j; ++k) {
      const auto& r = records[k];
      const int expected = static_cast<int>(k - i);
      if (r.turn.turn_index != expected) {
        throw Error(Errc::MalformedRecord,
                    where(r) + ": turn_index not contiguous, expected " + std::to_string(expected));
      }
      const Agent expected_agent = expected % 2 == 0 ? Agent::User : Agent::Ai;
      if (r.turn.agent != expected_agent) {
        throw Error(Errc::AlternationViolation,
                    where(r) + ": expected agent " + std::string(to_string(expected_agent)));
      }
      if (story.genre == Genre::Unknown) story.genre = r.genre;
    }

    std::size_t end = j;
    if ((end - i) % 2 == 1) {
      if (!options.drop_trailing_user_turn) {
        throw Error(Errc::OrphanTurn, where(records[end - 1]) + ": user turn has no AI reply");
      }
      --end;
    }

    std::set<std::string> story_sessions;
    for (std::size_t k = i; k < end; k += 2) {
      Interaction inter;
      inter.interaction_index = static_cast<int>((k - i) / 2);
      inter.user_turn = records[k].turn;
      inter.ai_turn = records[k + 1].turn;
      if (inter.ai_turn.session_id.empty()) inter.ai_turn.session_id = inter.user_turn.session_id;
      if (inter.ai_turn.session_id != inter.user_turn.session_id) {
        throw Error(Errc::MalformedRecord,
                    where(records[k + 1]) + ": AI turn session differs from its user turn");
      }
      const auto& sid = inter.user_turn.session_id;
      if (story.sessions.empty() || story.sessions.back().session_id != sid) {
        if (!story_sessions.insert(sid).second || seen_sessions.count(sid)) {
          throw Error(Errc::MalformedRecord,
                      where(records[k]) + ": session '" + sid + "' is not contiguous or reused");
        }
        story.sessions.push_back(Session{sid, story.story_id, inter.interaction_index, 0});
      }
      story.sessions.back().length += 1;
      story.interactions.push_back(std::move(inter));
    }
    seen_sessions.insert(story_sessions.begin(), story_sessions.end());
    if (!story.interactions.empty()) corpus.stories.push_back(std::move(story));
    i = j;
  }
  return corpus;
}

std::string id_field(const json& rec, const char* name, long line) {
  auto it = rec.find(name);
  if (it == rec.end()) {
    throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": missing field " + name);
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw Error(Errc::MalformedRecord,
              "line " + std::to_string(line) + ": field " + name + " must be a string or integer");
}

}  // namespace

Corpus build_corpus(std::vector<Turn> turns, Dataset dataset, const LoadOptions& options) {
  std::vector<Record> records;
  records.reserve(turns.size());
  for (auto& t : turns) records.push_back(Record{std::move(t), Genre::Unknown, 0});
  return build_from_records(std::move(records), dataset, options);
}

Corpus load_transcripts(std::istream& in, Dataset dataset, const LoadOptions& options) {
  std::vector<Record> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::collapse_whitespace(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": not an object");
    }
    Record r;
    r.line = line_no;
    try {
      r.turn.story_id = id_field(rec, "story_id", line_no);
      r.turn.session_id = id_field(rec, "session_id", line_no);
      if (!rec.contains("turn_index") || !rec["turn_index"].is_number_integer() ||
          rec["turn_index"].get<long long>() < 0) {
        throw Error(Errc::MalformedRecord, "turn_index must be a nonnegative integer");
      }
      r.turn.turn_index = static_cast<int>(rec["turn_index"].get<long long>());
      if (!rec.contains("agent") || !rec["agent"].is_string()) {
        throw Error(Errc::MalformedRecord, "missing field agent");
      }
      r.turn.agent = parse_agent(rec["agent"].get<std::string>());
      if (!rec.contains("text") || !rec["text"].is_string()) {
        throw Error(Errc::MalformedRecord, "missing field text");
      }
      r.turn.text = rec["text"].get<std::string>();
      r.turn.char_count = text::code_point_length(r.turn.text);
      if (auto it = rec.find("genre"); it != rec.end() && it->is_string()) {
        r.genre = parse_genre(it->get<std::string>());
      }
      if (auto it = rec.find("timestamp"); it != rec.end() && it->is_string()) {
        r.turn.timestamp = it->get<std::string>();
      }
    } catch (const Error& e) {
      if (e.code() != Errc::MalformedRecord) throw;
      std::string msg = e.what();
      if (msg.find("line ") == std::string::npos) {
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": " + msg);
      }
      throw;
    }
    records.push_back(std::move(r));
  }
  return build_from_records(std::move(records), dataset, options);
}

Corpus load_transcripts(const std::filesystem::path& path, Dataset dataset,
                        const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  Corpus c = load_transcripts(in, dataset, options);
  c.provenance.source_path = path.string();
  c.provenance.ingested_at = utc_now();
  return c;
}

void write_transcripts(const Corpus& corpus, std::ostream& out) {
  auto emit = [&](const Story& story, const Turn& t) {
    json rec;
    rec["story_id"] = t.story_id;
    rec["session_id"] = t.session_id;
    rec["turn_index"] = t.turn_index;
    rec["agent"] = std::string(to_string(t.agent));
    rec["text"] = t.text;
    if (story.genre != Genre::Unknown) rec["genre"] = std::string(to_string(story.genre));
    if (!t.timestamp.empty()) rec["timestamp"] = t.timestamp;
    out << rec.dump() << '\n';
  };
  for (const auto& story : corpus.stories) {
    for (const auto& inter : story.interactions) {
      emit(story, inter.user_turn);
      emit(story, inter.ai_turn);
    }
  }
}

int ValidationReport::total_under_length() const {
  int n = 0;
  for (const auto& s : stories) n += s.under_length;
  return n;
}

int ValidationReport::total_empty() const {
  int n = 0;
  for (const auto& s : stories) n += s.empty;
  return n;
}

int ValidationReport::total_alternation() const {
  int n = 0;
  for (const auto& s : stories) n += s.alternation;
  return n;
}

ValidationReport validate_corpus(const Corpus& corpus, std::size_t min_user_chars) {
  ValidationReport report;
  for (const auto& story : corpus.stories) {
    StoryViolations v;
    v.story_id = story.story_id;
    for (std::size_t i = 0; i < story.interactions.size(); ++i) {
      const auto& inter = story.interactions[i];
      const int u_index = static_cast<int>(2 * i);
      if (inter.user_turn.agent != Agent::User || inter.user_turn.turn_index != u_index) {
        ++v.alternation;
      }
      if (inter.ai_turn.agent != Agent::Ai || inter.ai_turn.turn_index != u_index + 1) {
        ++v.alternation;
      }
      for (const Turn* t : {&inter.user_turn, &inter.ai_turn}) {
        if (text::collapse_whitespace(t->text).empty()) ++v.empty;
      }
      if (!text::collapse_whitespace(inter.user_turn.text).empty() &&
          inter.user_turn.char_count < min_user_chars) {
        ++v.under_length;
      }
    }
    report.stories.push_back(std::move(v));
  }
  return report;
}

std::map<std::string, int> session_lengths(const Corpus& corpus) {
  std::map<std::string, int> out;
  for (const auto& story : corpus.stories)
    for (const auto& s : story.sessions) out[s.session_id] += s.length;
  return out;
}

}  // namespace dyadic
