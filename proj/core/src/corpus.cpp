#include "eed/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eed/error.hpp"
#include "eed/text.hpp"

namespace eed {

using nlohmann::json;

void Post::validate() const {
  if (id.empty()) fail("post has empty id");
  if (tokens.empty()) fail("post '" + id + "' has no tokens");
  for (const auto& t : tokens)
    if (t.empty()) fail("post '" + id + "' contains an empty token");
  if (!is_repost && original_id.has_value())
    fail("post '" + id + "' has original_id but is not a repost");
}

void CorpusWindow::validate() const {
  if (!(start < end)) fail("corpus window start must precede end");
}

namespace {

Post post_from_json(const json& j, const PostLoadOptions& options) {
  Post p;
  p.id = j.at("id").get<std::string>();
  p.timestamp = parse_instant(j.at("ts").get<std::string>());
  for (const auto& tok : j.at("tokens")) {
    std::string t = tok.get<std::string>();
    if (options.strip_noise_tokens && is_noise_token(t)) continue;
    p.tokens.push_back(std::move(t));
  }
  p.is_repost = j.value("is_repost", false);
  if (j.contains("original_id") && !j.at("original_id").is_null())
    p.original_id = j.at("original_id").get<std::string>();
  if (j.contains("author") && !j.at("author").is_null())
    p.author = j.at("author").get<std::string>();
  return p;
}

json post_to_json(const Post& p) {
  json j;
  j["id"] = p.id;
  j["ts"] = format_rfc3339(p.timestamp);
  j["tokens"] = p.tokens;
  j["is_repost"] = p.is_repost;
  if (p.original_id) j["original_id"] = *p.original_id;
  if (p.author) j["author"] = *p.author;
  return j;
}

}  // namespace

struct PostReader::Impl {
  std::ifstream in;
  std::filesystem::path path;
  PostLoadOptions options;
  size_t line_no = 0;
  bool have_prev = false;
  Instant prev_ts;
};

PostReader::PostReader(const std::filesystem::path& path, PostLoadOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->in.open(path);
  if (!impl_->in) fail("cannot open posts file '" + path.string() + "'");
  impl_->path = path;
  impl_->options = options;
}

PostReader::~PostReader() = default;
PostReader::PostReader(PostReader&&) noexcept = default;
PostReader& PostReader::operator=(PostReader&&) noexcept = default;

std::optional<Post> PostReader::next() {
  std::string line;
  while (std::getline(impl_->in, line)) {
    ++impl_->line_no;
    if (line.empty()) continue;
    Post p;
    try {
      p = post_from_json(json::parse(line), impl_->options);
      p.validate();
    } catch (const json::exception& e) {
      fail(impl_->path.string() + ":" + std::to_string(impl_->line_no) +
           ": parse error: " + e.what());
    } catch (const Error& e) {
      fail(impl_->path.string() + ":" + std::to_string(impl_->line_no) + ": " + e.what());
    }
    if (impl_->have_prev && p.timestamp < impl_->prev_ts)
      fail(impl_->path.string() + ":" + std::to_string(impl_->line_no) +
           ": post '" + p.id + "' is out of timestamp order");
    impl_->have_prev = true;
    impl_->prev_ts = p.timestamp;
    return p;
  }
  return std::nullopt;
}

std::vector<Post> load_posts(const std::filesystem::path& path, PostLoadOptions options) {
  PostReader reader(path, options);
  std::vector<Post> posts;
  while (auto p = reader.next()) posts.push_back(std::move(*p));
  return posts;
}

void save_posts(const std::filesystem::path& path, std::span<const Post> posts) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const Post& p : posts) out << post_to_json(p).dump() << '\n';
  if (!out) fail("write to '" + path.string() + "' failed");
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool parse_flag(const std::string& s, const std::string& context) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  fail(context + ": malformed boolean flag '" + s + "'");
}

}  // namespace

std::vector<KBEntity> load_kb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open KB file '" + path.string() + "'");
  std::vector<KBEntity> entities;
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (row == 1 && !fields.empty() && fields[0] == "title") continue;  // header
    const std::string context = path.string() + ":" + std::to_string(row);
    if (fields.size() != 4) fail(context + ": expected 4 tab-separated fields");
    KBEntity e;
    e.title = fields[0];
    if (e.title.empty()) fail(context + ": empty title");
    try {
      e.registered_at = parse_instant(fields[1]);
    } catch (const Error& err) {
      fail(context + ": " + err.what());
    }
    e.is_redirect = parse_flag(fields[2], context);
    e.is_disambiguation = parse_flag(fields[3], context);
    if (e.is_redirect || e.is_disambiguation) continue;
    entities.push_back(std::move(e));
  }
  std::stable_sort(entities.begin(), entities.end(),
                   [](const KBEntity& a, const KBEntity& b) {
                     return a.registered_at < b.registered_at;
                   });
  return entities;
}

void save_kb(const std::filesystem::path& path, std::span<const KBEntity> entities) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  out << "title\tregistered_at\tis_redirect\tis_disambiguation\n";
  for (const KBEntity& e : entities)
    out << e.title << '\t' << format_rfc3339(e.registered_at) << '\t'
        << (e.is_redirect ? 1 : 0) << '\t' << (e.is_disambiguation ? 1 : 0) << '\n';
  if (!out) fail("write to '" + path.string() + "' failed");
}

std::vector<GoldSpan> load_gold_spans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open gold spans file '" + path.string() + "'");
  std::vector<GoldSpan> spans;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      GoldSpan s;
      s.post_id = j.at("post_id").get<std::string>();
      s.start = j.at("start").get<size_t>();
      s.end = j.at("end").get<size_t>();
      s.entity = j.at("entity").get<std::string>();
      spans.push_back(std::move(s));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": parse error: " + e.what());
    }
  }
  return spans;
}

void save_gold_spans(const std::filesystem::path& path, std::span<const GoldSpan> spans) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const GoldSpan& s : spans) {
    json j;
    j["post_id"] = s.post_id;
    j["start"] = s.start;
    j["end"] = s.end;
    j["entity"] = s.entity;
    out << j.dump() << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

std::vector<std::pair<size_t, size_t>> find_token_subsequence(
    std::span<const std::string> hay, std::span<const std::string> needle) {
  std::vector<std::pair<size_t, size_t>> hits;
  if (needle.empty() || hay.size() < needle.size()) return hits;
  size_t i = 0;
  while (i + needle.size() <= hay.size()) {
    bool match = true;
    for (size_t j = 0; j < needle.size(); ++j) {
      if (hay[i + j] != needle[j]) {
        match = false;
        break;
      }
    }
    if (match) {
      hits.emplace_back(i, i + needle.size());
      i += needle.size();  // greedy, non-overlapping
    } else {
      ++i;
    }
  }
  return hits;
}

bool mentions(const Post& post, std::span<const std::string> canonical_surface) {
  const auto hay = canonical_tokens(post.tokens);
  return !find_token_subsequence(hay, canonical_surface).empty();
}

size_t count_mentions(const std::string& entity_surface, std::span<const Post> posts,
                      const CorpusWindow& window) {
  const auto needle = canonical_surface_tokens(entity_surface);
  size_t count = 0;
  for (const Post& p : posts) {
    if (!window.contains(p.timestamp)) continue;
    if (mentions(p, needle)) ++count;
  }
  return count;
}

}  // namespace eed
