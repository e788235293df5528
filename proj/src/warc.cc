#include "filter_audit/warc.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

#include "filter_audit/text.h"
#include "json.hpp"

namespace filter_audit {
namespace {

constexpr std::size_t kChunk = 1 << 16;
constexpr std::string_view kTrailer = "\r\n\r\n";

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool IsVersionLine(std::string_view line) {
  return line.rfind("WARC/1.", 0) == 0 && line.size() <= 10;
}

class PlainSource : public ByteSource {
 public:
  PlainSource(std::istream& in, std::string prefix) : in_(in), prefix_(std::move(prefix)) {}

  std::size_t Read(char* out, std::size_t n) override {
    if (prefix_pos_ < prefix_.size()) {
      std::size_t k = std::min(n, prefix_.size() - prefix_pos_);
      std::memcpy(out, prefix_.data() + prefix_pos_, k);
      prefix_pos_ += k;
      return k;
    }
    in_.read(out, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::istream& in_;
  std::string prefix_;
  std::size_t prefix_pos_ = 0;
};

class GzipSource : public ByteSource {
 public:
  GzipSource(std::istream& in, std::string prefix) : in_(in), inbuf_(kChunk) {
    std::memset(&zs_, 0, sizeof(zs_));
    if (inflateInit2(&zs_, 16 + MAX_WBITS) != Z_OK) {
      throw RuntimeError("zlib inflateInit2 failed");
    }
    if (!prefix.empty()) {
      if (prefix.size() > inbuf_.size()) inbuf_.resize(prefix.size());
      std::memcpy(inbuf_.data(), prefix.data(), prefix.size());
      zs_.next_in = inbuf_.data();
      zs_.avail_in = static_cast<uInt>(prefix.size());
    }
  }

  ~GzipSource() override { inflateEnd(&zs_); }

  std::size_t Read(char* out, std::size_t n) override {
    if (need_resync_) {
      need_resync_ = false;
      SkipToNextMember();
      corrupt_ = true;
      return 0;
    }
    zs_.next_out = reinterpret_cast<Bytef*>(out);
    zs_.avail_out = static_cast<uInt>(n);
    auto produced = [&] { return n - zs_.avail_out; };

    while (produced() == 0) {
      if (zs_.avail_in == 0 && !Refill(1)) {
        if (member_active_) {
          // Truncated final member.
          member_active_ = false;
          inflateReset(&zs_);
          corrupt_ = true;
        }
        return 0;
      }
      if (!member_active_) {
        if (!AtMemberHeader()) {
          if (zs_.avail_in == 0) return 0;  // clean end after trailing bytes
          SkipToNextMember();
          corrupt_ = true;
          return 0;
        }
        member_active_ = true;
      }
      int ret = inflate(&zs_, Z_NO_FLUSH);
      if (ret == Z_STREAM_END) {
        inflateReset(&zs_);
        member_active_ = false;
        continue;
      }
      if (ret == Z_OK || ret == Z_BUF_ERROR) continue;
      // Damaged member.
      inflateReset(&zs_);
      member_active_ = false;
      if (produced() > 0) {
        need_resync_ = true;
        return produced();
      }
      SkipToNextMember();
      corrupt_ = true;
      return 0;
    }
    return produced();
  }

  bool TakeCorruption() override {
    bool c = corrupt_;
    corrupt_ = false;
    return c;
  }

 private:
  // Ensures at least `k` unread input bytes, compacting the buffer. Returns
  // false if fewer are available at end of input.
  bool Refill(std::size_t k) {
    while (zs_.avail_in < k) {
      if (input_eof_) return false;
      std::size_t keep = zs_.avail_in;
      if (keep > 0 && zs_.next_in != inbuf_.data()) {
        std::memmove(inbuf_.data(), zs_.next_in, keep);
      }
      in_.read(reinterpret_cast<char*>(inbuf_.data() + keep),
               static_cast<std::streamsize>(inbuf_.size() - keep));
      std::size_t got = static_cast<std::size_t>(in_.gcount());
      if (got == 0) input_eof_ = true;
      zs_.next_in = inbuf_.data();
      zs_.avail_in = static_cast<uInt>(keep + got);
    }
    return true;
  }

  // Gzip member header: ID1 ID2 CM=8 and no reserved flag bits.
  bool AtMemberHeader() {
    if (!Refill(4)) return false;
    const Bytef* p = zs_.next_in;
    return p[0] == 0x1f && p[1] == 0x8b && p[2] == 0x08 && (p[3] & 0xe0) == 0;
  }

  void SkipToNextMember() {
    inflateReset(&zs_);
    member_active_ = false;
    if (zs_.avail_in > 0) {
      ++zs_.next_in;
      --zs_.avail_in;
    }
    while (true) {
      if (!Refill(4)) {
        zs_.avail_in = 0;
        return;
      }
      if (AtMemberHeader()) return;
      ++zs_.next_in;
      --zs_.avail_in;
    }
  }

  std::istream& in_;
  std::vector<Bytef> inbuf_;
  z_stream zs_;
  bool member_active_ = false;
  bool corrupt_ = false;
  bool need_resync_ = false;
  bool input_eof_ = false;
};

std::string ReadPrefix(std::istream& in, std::size_t n) {
  std::string prefix(n, '\0');
  in.read(prefix.data(), static_cast<std::streamsize>(n));
  prefix.resize(static_cast<std::size_t>(in.gcount()));
  return prefix;
}

}  // namespace

std::optional<std::string> WarcRecord::Header(std::string_view name) const {
  for (const auto& [k, v] : headers) {
    if (EqualsIgnoreCase(k, name)) return v;
  }
  return std::nullopt;
}

std::string FormatWarcRecord(const WarcRecord& record) {
  std::string out = record.version;
  out += "\r\n";
  bool wrote_length = false;
  for (const auto& [k, v] : record.headers) {
    if (EqualsIgnoreCase(k, "Content-Length")) {
      out += "Content-Length: " + std::to_string(record.payload.size()) + "\r\n";
      wrote_length = true;
      continue;
    }
    out += k + ": " + v + "\r\n";
  }
  if (!wrote_length) {
    out += "Content-Length: " + std::to_string(record.payload.size()) + "\r\n";
  }
  out += "\r\n";
  out += record.payload;
  out += kTrailer;
  return out;
}

std::string GzipMember(std::string_view data) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (deflateInit2(&zs, 6, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw RuntimeError("zlib deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())) + 32, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int ret = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (ret != Z_STREAM_END) throw RuntimeError("zlib deflate failed");
  out.resize(zs.total_out);
  return out;
}

void WarcWriter::Write(const WarcRecord& record) {
  std::string bytes = FormatWarcRecord(record);
  if (gzip_) bytes = GzipMember(bytes);
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw IoError("WARC write failed");
}

std::unique_ptr<ByteSource> MakePlainSource(std::istream& in) {
  return std::make_unique<PlainSource>(in, std::string());
}

std::unique_ptr<ByteSource> MakeGzipSource(std::istream& in) {
  return std::make_unique<GzipSource>(in, std::string());
}

std::unique_ptr<ByteSource> MakeAutoSource(std::istream& in) {
  std::string prefix = ReadPrefix(in, 2);
  if (prefix.size() == 2 && static_cast<unsigned char>(prefix[0]) == 0x1f &&
      static_cast<unsigned char>(prefix[1]) == 0x8b) {
    return std::make_unique<GzipSource>(in, std::move(prefix));
  }
  return std::make_unique<PlainSource>(in, std::move(prefix));
}

// ---------------------------------------------------------------------------
// WarcReader

WarcReader::WarcReader(std::unique_ptr<ByteSource> source) : source_(std::move(source)) {}

bool WarcReader::Fill() {
  if (at_break_ || ended_) return false;
  std::array<char, kChunk> chunk;
  std::size_t n = source_->Read(chunk.data(), chunk.size());
  if (n == 0) {
    at_break_ = true;
    return false;
  }
  std::string_view data(chunk.data(), n);
  hasher_.Update(data);
  buf_.append(data);
  return true;
}

bool WarcReader::ReadLine(std::string& line) {
  std::size_t scan = pos_;
  while (true) {
    std::size_t nl = buf_.find('\n', scan);
    if (nl != std::string::npos) {
      std::size_t end = nl;
      if (end > pos_ && buf_[end - 1] == '\r') --end;
      line.assign(buf_, pos_, end - pos_);
      pos_ = nl + 1;
      return true;
    }
    scan = buf_.size();
    if (!Fill()) return false;
  }
}

bool WarcReader::Need(std::size_t n) {
  while (buf_.size() - pos_ < n) {
    if (!Fill()) return false;
  }
  return true;
}

void WarcReader::DropBuffer() {
  buf_.clear();
  pos_ = 0;
}

bool WarcReader::Resync(std::size_t from) {
  static constexpr std::string_view kMarker = "\r\n\r\nWARC/1.";
  std::size_t scan = from;
  while (true) {
    std::size_t hit = buf_.find(kMarker, scan);
    if (hit != std::string::npos) {
      pos_ = hit + kTrailer.size();
      return true;
    }
    scan = buf_.size() > kMarker.size() ? std::max(from, buf_.size() - kMarker.size()) : from;
    if (!Fill()) {
      bool corrupt = at_break_ && source_->TakeCorruption();
      at_break_ = false;
      DropBuffer();
      if (!corrupt) ended_ = true;
      return corrupt;
    }
  }
}

WarcReader::Step WarcReader::ParseOne(WarcRecord& record) {
  if (pos_ > 0) {
    buf_.erase(0, pos_);
    pos_ = 0;
  }

  // Handles running out of data: end of stream or a corruption break.
  auto out_of_data = [&](bool record_in_progress) {
    bool corrupt = at_break_ && source_->TakeCorruption();
    at_break_ = false;
    bool had_content = record_in_progress ||
                       !Trim(std::string_view(buf_).substr(pos_)).empty();
    if (had_content || corrupt) ++stats_.errors;
    DropBuffer();
    if (!corrupt) {
      ended_ = true;
      return Step::kEnd;
    }
    return Step::kError;
  };

  std::string line;
  do {
    if (!ReadLine(line)) return out_of_data(false);
  } while (Trim(line).empty());

  if (!IsVersionLine(line)) {
    if (!seen_first_line_) {
      throw FormatError("not a WARC stream: first line is '" + line.substr(0, 40) + "'");
    }
    ++stats_.errors;
    return Resync(0) ? Step::kError : Step::kEnd;
  }
  seen_first_line_ = true;
  record.version = line;
  record.headers.clear();
  record.payload.clear();

  while (true) {
    std::size_t line_start = pos_;
    if (!ReadLine(line)) return out_of_data(true);
    if (line.empty()) break;
    if (IsVersionLine(line)) {
      // Header block ran into the next record.
      ++stats_.errors;
      pos_ = line_start;
      return Step::kError;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos || colon == 0) {
      ++stats_.errors;
      return Resync(line_start) ? Step::kError : Step::kEnd;
    }
    record.headers.emplace_back(std::string(Trim(std::string_view(line).substr(0, colon))),
                                std::string(Trim(std::string_view(line).substr(colon + 1))));
  }

  auto length_field = record.Header("Content-Length");
  std::size_t length = 0;
  bool length_ok = length_field.has_value() && !length_field->empty();
  if (length_ok) {
    for (char c : *length_field) {
      if (c < '0' || c > '9' || length > (std::size_t{1} << 40)) {
        length_ok = false;
        break;
      }
      length = length * 10 + static_cast<std::size_t>(c - '0');
    }
  }
  std::size_t payload_start = pos_;
  if (!length_ok) {
    ++stats_.errors;
    return Resync(payload_start) ? Step::kError : Step::kEnd;
  }
  if (!Need(length + kTrailer.size())) {
    if (at_break_) {
      bool corrupt = source_->TakeCorruption();
      if (corrupt) {
        at_break_ = false;
        ++stats_.errors;
        DropBuffer();
        return Step::kError;
      }
    }
    // End of stream inside the declared payload: the length is wrong. Any
    // later record still sits in the buffer.
    ++stats_.errors;
    return Resync(payload_start) ? Step::kError : Step::kEnd;
  }
  if (std::string_view(buf_).substr(pos_ + length, kTrailer.size()) != kTrailer) {
    ++stats_.errors;
    return Resync(payload_start) ? Step::kError : Step::kEnd;
  }
  record.payload.assign(buf_, pos_, length);
  pos_ += length + kTrailer.size();
  ++stats_.records;
  return Step::kRecord;
}

bool WarcReader::Next(WarcRecord& record) {
  while (!ended_) {
    switch (ParseOne(record)) {
      case Step::kRecord: return true;
      case Step::kEnd: return false;
      case Step::kError: break;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Documents

namespace {

bool StartsWithTagCI(std::string_view s, std::size_t i, std::string_view tag) {
  if (i + tag.size() > s.size()) return false;
  return EqualsIgnoreCase(s.substr(i, tag.size()), tag);
}

bool IsBlockTag(std::string_view name) {
  static constexpr std::array<std::string_view, 22> kBlock = {
      "p",  "br", "div", "li", "ul",      "ol",      "tr",    "td",
      "h1", "h2", "h3",  "h4", "h5",      "h6",      "table", "section",
      "article", "header", "footer", "blockquote", "title", "pre"};
  return std::find_if(kBlock.begin(), kBlock.end(), [&](std::string_view b) {
           return EqualsIgnoreCase(b, name);
         }) != kBlock.end();
}

void AppendCodePoint(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes an entity starting at '&'. Returns consumed length, 0 if none.
std::size_t DecodeEntity(std::string_view s, std::size_t i, std::string& out) {
  std::size_t semi = s.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10) return 0;
  std::string_view name = s.substr(i + 1, semi - i - 1);
  static const std::pair<std::string_view, std::string_view> kNamed[] = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  for (const auto& [n, v] : kNamed) {
    if (name == n) {
      out.append(v);
      return semi - i + 1;
    }
  }
  if (name.size() >= 2 && name[0] == '#') {
    unsigned long cp = 0;
    bool hex = name[1] == 'x' || name[1] == 'X';
    std::string digits(name.substr(hex ? 2 : 1));
    if (digits.empty()) return 0;
    char* end = nullptr;
    cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
    if (end == nullptr || *end != '\0') return 0;
    AppendCodePoint(out, cp);
    return semi - i + 1;
  }
  return 0;
}

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  std::string line;
  auto flush_line = [&] {
    std::string_view t = Trim(line);
    if (!t.empty()) {
      if (!out.empty()) out.push_back('\n');
      out.append(t);
    }
    line.clear();
  };
  bool space = false;
  for (char c : text) {
    if (c == '\n') {
      flush_line();
      space = false;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      space = true;
    } else {
      if (space && !line.empty()) line.push_back(' ');
      space = false;
      line.push_back(c);
    }
  }
  flush_line();
  return out;
}

}  // namespace

std::string StripHtml(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '<') {
      if (StartsWithTagCI(html, i, "<!--")) {
        std::size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        out.push_back(' ');
        continue;
      }
      bool skipped_subtree = false;
      for (std::string_view tag : {std::string_view("script"), std::string_view("style")}) {
        if (StartsWithTagCI(html, i + 1, tag)) {
          std::size_t after = i + 1 + tag.size();
          if (after < html.size() && (html[after] == '>' || std::isspace(static_cast<unsigned char>(html[after])))) {
            std::string close = "</" + std::string(tag);
            std::size_t j = i;
            std::size_t end = std::string_view::npos;
            while ((j = html.find("</", j + 1)) != std::string_view::npos) {
              if (StartsWithTagCI(html, j, close)) {
                end = html.find('>', j);
                break;
              }
            }
            i = end == std::string_view::npos ? html.size() : end + 1;
            out.push_back(' ');
            skipped_subtree = true;
            break;
          }
        }
      }
      if (skipped_subtree) continue;
      std::size_t end = html.find('>', i);
      if (end == std::string_view::npos) {
        out.append(html.substr(i));
        break;
      }
      std::size_t name_begin = i + 1;
      if (name_begin < end && html[name_begin] == '/') ++name_begin;
      std::size_t name_end = name_begin;
      while (name_end < end && std::isalnum(static_cast<unsigned char>(html[name_end]))) ++name_end;
      out.push_back(IsBlockTag(html.substr(name_begin, name_end - name_begin)) ? '\n' : ' ');
      i = end + 1;
      continue;
    }
    if (c == '&') {
      std::size_t used = DecodeEntity(html, i, out);
      if (used > 0) {
        i += used;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return CollapseWhitespace(out);
}

std::optional<RawDocument> DocumentFromRecord(const WarcRecord& record) {
  std::string type = record.Type();
  bool conversion = EqualsIgnoreCase(type, "conversion");
  bool response = EqualsIgnoreCase(type, "response");
  if (!conversion && !response) return std::nullopt;

  RawDocument doc;
  doc.doc_id = record.Header("WARC-Record-ID").value_or("");
  if (doc.doc_id.empty()) doc.doc_id = "fnv:" + Hex64(Fnv1a64(record.payload));
  doc.url = record.Header("WARC-Target-URI");
  if (conversion) {
    doc.body = SanitizeUtf8(record.payload);
    return doc;
  }
  std::string_view body = record.payload;
  if (body.rfind("HTTP/", 0) == 0) {
    std::size_t split = body.find("\r\n\r\n");
    std::size_t skip = 4;
    if (split == std::string_view::npos) {
      split = body.find("\n\n");
      skip = 2;
    }
    body = split == std::string_view::npos ? std::string_view() : body.substr(split + skip);
  }
  doc.body = SanitizeUtf8(StripHtml(body));
  return doc;
}

std::vector<RawDocument> ReadCorpus(std::istream& in, CorpusFormat format,
                                    CorpusReadStats* stats) {
  CorpusReadStats local;
  std::vector<RawDocument> docs;
  if (format == CorpusFormat::kWarc) {
    WarcReader reader(in);
    WarcRecord record;
    while (reader.Next(record)) {
      auto doc = DocumentFromRecord(record);
      if (doc) {
        docs.push_back(std::move(*doc));
      } else {
        ++local.skipped_types;
      }
    }
    local.records = reader.stats().records;
    local.errors = reader.stats().errors;
    local.content_hash = reader.ContentHash();
  } else {
    Sha256 hasher;
    std::string line;
    while (std::getline(in, line)) {
      hasher.Update(line);
      hasher.Update("\n");
      if (Trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
        ++local.errors;
        continue;
      }
      ++local.records;
      RawDocument doc;
      doc.body = SanitizeUtf8(j["text"].get<std::string>());
      if (j.contains("doc_id") && j["doc_id"].is_string()) {
        doc.doc_id = j["doc_id"].get<std::string>();
      }
      if (doc.doc_id.empty()) doc.doc_id = "fnv:" + Hex64(Fnv1a64(doc.body));
      if (j.contains("url") && j["url"].is_string()) doc.url = j["url"].get<std::string>();
      docs.push_back(std::move(doc));
    }
    if (in.bad()) throw IoError("read error in JSONL corpus");
    local.content_hash = hasher.HexDigest();
  }
  local.documents = docs.size();
  if (stats) *stats = local;
  return docs;
}

std::vector<RawDocument> ReadCorpusFile(const std::string& path, CorpusFormat format,
                                        CorpusReadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path);
  return ReadCorpus(in, format, stats);
}

}  // namespace filter_audit
