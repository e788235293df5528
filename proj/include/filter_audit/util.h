#ifndef FILTER_AUDIT_UTIL_H_
#define FILTER_AUDIT_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace filter_audit {

// Error taxonomy. The CLI maps each kind onto a process exit code.
enum class ErrorKind { kValidation, kRuntime, kIo, kFormat };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::kValidation, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::kIo, w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(ErrorKind::kFormat, w) {}
};
struct RuntimeError : Error {
  explicit RuntimeError(const std::string& w) : Error(ErrorKind::kRuntime, w) {}
};

const char* ErrorKindName(ErrorKind kind);

// FNV-1a 64-bit. Fixed for cross-platform determinism of feature hashing.
constexpr std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Hex64(std::uint64_t v);

// SHA-256 of a byte string, lowercase hex.
std::string Sha256Hex(std::string_view data);

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  void Update(std::string_view data);
  std::string HexDigest();

 private:
  void* ctx_;
};

std::string Sha256File(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
// Writes to a sibling temp file then renames over the destination.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

std::vector<std::string> SplitString(std::string_view s, char sep);
std::string_view Trim(std::string_view s);
std::string JoinStrings(const std::vector<std::string>& parts, std::string_view sep);

// Unbiased draw in [0, n) from a 64-bit engine. std::uniform_int_distribution
// is implementation-defined, so sampling and shuffles go through this.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t n);
double UniformUnit(std::mt19937_64& rng);
template <typename T>
void DeterministicShuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = UniformBelow(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// Derives an independent child seed from (seed, stream).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
// into pre-sized slots so output order never depends on scheduling.
void ParallelFor(std::size_t n, unsigned jobs,
                 const std::function<void(std::size_t)>& fn);

unsigned DefaultJobs();

// 17 significant digits ("%.17g"); parses back to the identical double.
std::string FormatDouble17(double v);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_UTIL_H_
