#ifndef FILTER_AUDIT_WARC_H_
#define FILTER_AUDIT_WARC_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "filter_audit/util.h"

namespace filter_audit {

struct WarcRecord {
  std::string version = "WARC/1.0";
  std::vector<std::pair<std::string, std::string>> headers;
  std::string payload;

  // Case-insensitive header lookup.
  std::optional<std::string> Header(std::string_view name) const;
  std::string Type() const { return Header("WARC-Type").value_or(""); }

  bool operator==(const WarcRecord&) const = default;
};

// Serialized record bytes. Content-Length is always rewritten to match the
// payload.
std::string FormatWarcRecord(const WarcRecord& record);

// Compresses `data` as one standalone gzip member.
std::string GzipMember(std::string_view data);

class WarcWriter {
 public:
  // With gzip_members set, each record becomes its own gzip member (the
  // Common Crawl layout).
  WarcWriter(std::ostream& out, bool gzip_members) : out_(out), gzip_(gzip_members) {}
  void Write(const WarcRecord& record);

 private:
  std::ostream& out_;
  bool gzip_;
};

// Byte producer feeding the record parser. Read returns 0 at end of stream or
// at a corruption point; TakeCorruption tells the two apart and resets the
// flag so reading can resume past the damage.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t Read(char* out, std::size_t n) = 0;
  virtual bool TakeCorruption() { return false; }
};

std::unique_ptr<ByteSource> MakePlainSource(std::istream& in);
// Multi-member gzip. A damaged member ends in a corruption break and the
// source resynchronizes at the next member header.
std::unique_ptr<ByteSource> MakeGzipSource(std::istream& in);
// Sniffs the gzip magic and picks the right source.
std::unique_ptr<ByteSource> MakeAutoSource(std::istream& in);

struct WarcStats {
  std::size_t records = 0;  // records parsed successfully
  std::size_t errors = 0;   // records dropped as malformed

  bool operator==(const WarcStats&) const = default;
};

// Streaming WARC/1.x reader. Malformed records (unterminated header block,
// Content-Length disagreeing with the record boundary, corrupt gzip member)
// are skipped and counted. A stream whose first line is not a WARC version
// line raises FormatError.
class WarcReader {
 public:
  explicit WarcReader(std::unique_ptr<ByteSource> source);
  explicit WarcReader(std::istream& in) : WarcReader(MakeAutoSource(in)) {}

  bool Next(WarcRecord& record);
  const WarcStats& stats() const { return stats_; }
  // SHA-256 over every decompressed byte consumed so far. Independent of the
  // compression layout, so usable as corpus provenance.
  std::string ContentHash() { return hasher_.HexDigest(); }

 private:
  enum class Step { kRecord, kError, kEnd };

  Step ParseOne(WarcRecord& record);
  bool Fill();
  bool ReadLine(std::string& line);
  bool Need(std::size_t n);
  // Moves pos_ to the start of the next record after a bad record beginning at
  // `from`. Returns false at end of data.
  bool Resync(std::size_t from);
  void DropBuffer();

  std::unique_ptr<ByteSource> source_;
  std::string buf_;
  std::size_t pos_ = 0;
  bool at_break_ = false;
  bool ended_ = false;
  bool seen_first_line_ = false;
  WarcStats stats_;
  Sha256 hasher_;
};

// A document before gating.
struct RawDocument {
  std::string doc_id;
  std::optional<std::string> url;
  std::string body;

  bool operator==(const RawDocument&) const = default;
};

// Reduces HTML to text: script/style subtrees removed, tags collapsed to
// whitespace (newline for block-level tags), common entities decoded.
std::string StripHtml(std::string_view html);

enum class CorpusFormat { kWarc, kJsonl };

struct CorpusReadStats {
  std::size_t records = 0;    // WARC records or JSONL lines parsed
  std::size_t documents = 0;  // RawDocuments yielded
  std::size_t skipped_types = 0;
  std::size_t errors = 0;
  std::string content_hash;

  bool operator==(const CorpusReadStats&) const = default;
};

// Yields RawDocuments from response/conversion records (WARC and WET) or
// from JSONL objects with doc_id/url/text fields.
std::vector<RawDocument> ReadCorpus(std::istream& in, CorpusFormat format,
                                    CorpusReadStats* stats);
std::vector<RawDocument> ReadCorpusFile(const std::string& path, CorpusFormat format,
                                        CorpusReadStats* stats);

// Maps one WARC record to a RawDocument, or nullopt for non-document types.
std::optional<RawDocument> DocumentFromRecord(const WarcRecord& record);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_WARC_H_
