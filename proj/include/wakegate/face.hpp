#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wakegate {

// Pre-cropped grayscale face, normalized to 64x64 with pixels in [0, 1].
// Detection/cropping happens upstream; this module only matches.
struct FaceImage {
  static constexpr std::size_t kSide = 64;
  static constexpr std::size_t kPixels = kSide * kSide;
  std::vector<double> pixels;  // row-major, kPixels long
  std::string source_id;
};

// 128-dimensional unit vector.
struct FaceEmbedding {
  static constexpr std::size_t kDim = 128;
  std::array<double, kDim> v{};

  double norm() const;
};

double embedding_distance(const FaceEmbedding& a, const FaceEmbedding& b);

// Deterministic stand-in for a metric network: a seeded random projection of
// the mean-removed pixel vector, L2-normalized. Mean removal keeps unrelated
// images near-orthogonal after projection. Swappable for a learned model
// behind the same call; externally computed embeddings can also be imported.
class Embedder {
 public:
  explicit Embedder(std::uint64_t seed);
  FaceEmbedding embed(const FaceImage& image) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<double> projection_;  // kDim x kPixels, row-major
};

struct EnrollmentDb {
  std::map<std::string, std::vector<FaceEmbedding>> entries;  // identity -> embeddings
  std::uint32_t version = 1;
  std::uint64_t created_at = 0;  // unix seconds; 0 when timestamps are frozen

  std::size_t embedding_count() const;
};

// Appends embeddings for the identity (existing identities extend).
void enroll(EnrollmentDb& db, const std::string& identity, const std::vector<FaceImage>& images,
            const Embedder& embedder);
void enroll_embeddings(EnrollmentDb& db, const std::string& identity,
                       const std::vector<FaceEmbedding>& embeddings);

struct MatchResult {
  bool matched = false;
  std::optional<std::string> identity;
  double distance = 0.0;  // +inf when the database is empty
  double threshold = 0.0;
  std::string cause;  // set when unmatched ("empty database" | "above threshold")
};

// Nearest neighbor by Euclidean distance over every stored embedding; a
// match requires min distance <= threshold. Distance ties resolve to the
// lexicographically smallest identity.
MatchResult recognize(const EnrollmentDb& db, const FaceEmbedding& query, double threshold);

struct AuthEvent {
  enum class Kind : std::uint8_t { granted, denied };
  Kind kind = Kind::denied;
  std::optional<std::string> identity;
  double best_distance = 0.0;  // kept for audit logs on denials
};

AuthEvent gate_decision(const MatchResult& match);

// Binary database file; layout documented in FORMATS.md. Embedding records
// are little-endian float32, so values quantize on save; a save/load/save
// cycle is byte-identical.
void save_db(const EnrollmentDb& db, const std::filesystem::path& path);
EnrollmentDb load_db(const std::filesystem::path& path);

// 64x64 PGM (P5 binary or P2 ascii), any maxval up to 65535.
FaceImage read_pgm(const std::filesystem::path& path);
void write_pgm(const FaceImage& image, const std::filesystem::path& path);

// Text import: one `identity,v0,v1,...,v127` line per embedding.
std::vector<std::pair<std::string, FaceEmbedding>> import_embeddings_text(
    const std::filesystem::path& path);

}  // namespace wakegate
