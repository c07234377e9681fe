#include "granusim/similarity.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "granusim/io.hpp"

namespace granusim {

using nlohmann::json;

std::vector<ScoredPair> score_pairs(const PairCollection& pairs, const EmbeddingProvider& lexical,
                                    const EmbeddingProvider* contextual, std::optional<double> w) {
  if (w && !contextual) throw UsageError("interpolation requested without a contextual score source");
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    ScoredPair s;
    s.pair = p;
    s.g_t = lexical.similarity(p.id1, p.id2);
    s.method_tags.push_back(lexical.tag());
    if (contextual) {
      s.g_r = contextual->similarity(p.id1, p.id2);
      s.method_tags.push_back(contextual->tag());
      if (w) s.g_i = interpolate(*s.g_t, *s.g_r, *w);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_scored_pairs(std::ostream& out, const std::vector<ScoredPair>& scored) {
  for (const auto& s : scored) {
    std::ostringstream base;
    write_pairs(base, PairCollection{s.pair});
    std::string line = base.str();
    line.resize(line.size() - 2);  // drop "}\n"
    if (s.g_t) line += ",\"g_t\":" + format_real(*s.g_t);
    if (s.g_r) line += ",\"g_r\":" + format_real(*s.g_r);
    if (s.g_i) line += ",\"g_i\":" + format_real(*s.g_i);
    line += ",\"method_tags\":" + json(s.method_tags).dump();
    out << line << "}\n";
  }
}

namespace {

std::optional<double> score_field(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError("line " + std::to_string(line_no) + ": '" + key + "' must be a number");
  const double v = it->get<double>();
  if (!(v >= -1.0 && v <= 1.0)) {
    throw DataError("line " + std::to_string(line_no) + ": '" + key + "' outside [-1, 1]");
  }
  return v;
}

}  // namespace

std::vector<ScoredPair> read_scored_pairs(std::istream& in) {
  std::vector<ScoredPair> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed record (" + e.what() + ")");
    }
    if (!obj.is_object() || !obj.contains("id1") || !obj.contains("id2") || !obj["id1"].is_string() ||
        !obj["id2"].is_string()) {
      throw DataError(where + "scored pair needs string ids");
    }
    ScoredPair s;
    s.pair = make_pair_record(obj["id1"].get<std::string>(), obj["id2"].get<std::string>());
    if (!seen.emplace(s.pair.id1, s.pair.id2).second) {
      throw DataError(where + "duplicate pair (" + s.pair.id1 + ", " + s.pair.id2 + ")");
    }
    for (auto [key, field] : {std::pair{"granular", &s.pair.granular}, std::pair{"abstract", &s.pair.abstract}}) {
      if (obj.contains(key) && !obj[key].is_null()) {
        const auto& v = obj[key];
        if (!(v.is_number_integer() || v.is_boolean())) throw DataError(where + "'" + key + "' must be 0 or 1");
        const long long x = v.is_boolean() ? v.get<bool>() : v.get<long long>();
        if (x != 0 && x != 1) throw DataError(where + "'" + key + "' must be 0 or 1");
        *field = x == 1;
      }
    }
    s.pair.proxy_score = score_field(obj, "proxy_score", line_no);
    s.g_t = score_field(obj, "g_t", line_no);
    s.g_r = score_field(obj, "g_r", line_no);
    s.g_i = score_field(obj, "g_i", line_no);
    if (s.g_i && !(s.g_t && s.g_r)) throw DataError(where + "g_i present without both g_t and g_r");
    if (obj.contains("method_tags")) {
      const auto& tags = obj["method_tags"];
      if (!tags.is_array()) throw DataError(where + "'method_tags' must be an array");
      for (const auto& t : tags) {
        if (!t.is_string()) throw DataError(where + "'method_tags' entries must be strings");
        s.method_tags.push_back(t.get<std::string>());
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void save_scored_pairs(const std::filesystem::path& path, const std::vector<ScoredPair>& scored) {
  std::ostringstream out;
  write_scored_pairs(out, scored);
  write_file(path, out.str());
}

std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_scored_pairs(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace granusim
