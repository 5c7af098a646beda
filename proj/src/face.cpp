#include "wakegate/face.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "wakegate/errors.hpp"
#include "wakegate/rng.hpp"

namespace wakegate {

double FaceEmbedding::norm() const {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double embedding_distance(const FaceEmbedding& a, const FaceEmbedding& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < FaceEmbedding::kDim; ++i) {
    const double d = a.v[i] - b.v[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

Embedder::Embedder(std::uint64_t seed) : seed_(seed) {
  Rng rng(mix_seed(seed, 0xface));
  projection_.resize(FaceEmbedding::kDim * FaceImage::kPixels);
  for (auto& p : projection_) p = rng.normal();
}

FaceEmbedding Embedder::embed(const FaceImage& image) const {
  if (image.pixels.size() != FaceImage::kPixels)
    throw InvalidArgument("face image must be 64x64");
  for (double p : image.pixels)
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("face pixels must lie in [0, 1]");

  double mean = 0.0;
  for (double p : image.pixels) mean += p;
  mean /= static_cast<double>(FaceImage::kPixels);

  FaceEmbedding e;
  for (std::size_t d = 0; d < FaceEmbedding::kDim; ++d) {
    const double* row = projection_.data() + d * FaceImage::kPixels;
    double acc = 0.0;
    for (std::size_t i = 0; i < FaceImage::kPixels; ++i) acc += row[i] * (image.pixels[i] - mean);
    e.v[d] = acc;
  }
  const double n = e.norm();
  if (n < 1e-12)
    throw InvalidArgument("degenerate image: constant pixels have no embedding direction");
  for (auto& x : e.v) x /= n;
  return e;
}

std::size_t EnrollmentDb::embedding_count() const {
  std::size_t n = 0;
  for (const auto& [_, v] : entries) n += v.size();
  return n;
}

void enroll(EnrollmentDb& db, const std::string& identity, const std::vector<FaceImage>& images,
            const Embedder& embedder) {
  if (images.empty()) throw InvalidArgument("enrollment needs at least one image");
  if (identity.empty()) throw InvalidArgument("identity must be non-empty");
  auto& list = db.entries[identity];
  for (const auto& img : images) list.push_back(embedder.embed(img));
}

void enroll_embeddings(EnrollmentDb& db, const std::string& identity,
                       const std::vector<FaceEmbedding>& embeddings) {
  if (embeddings.empty()) throw InvalidArgument("enrollment needs at least one embedding");
  if (identity.empty()) throw InvalidArgument("identity must be non-empty");
  for (const auto& e : embeddings)
    if (std::abs(e.norm() - 1.0) > 1e-5) throw InvalidArgument("embedding is not unit length");
  auto& list = db.entries[identity];
  list.insert(list.end(), embeddings.begin(), embeddings.end());
}

MatchResult recognize(const EnrollmentDb& db, const FaceEmbedding& query, double threshold) {
  if (threshold <= 0.0) throw InvalidArgument("match threshold must be positive");

  MatchResult r;
  r.threshold = threshold;
  if (db.entries.empty()) {
    r.distance = std::numeric_limits<double>::infinity();
    r.cause = "empty database";
    return r;
  }

  double best = std::numeric_limits<double>::infinity();
  const std::string* best_id = nullptr;
  // std::map iterates identities in lexicographic order, so on exact ties
  // the smallest identity wins by first-strictly-better scanning
  for (const auto& [identity, embeddings] : db.entries)
    for (const auto& e : embeddings) {
      const double d = embedding_distance(query, e);
      if (d < best) {
        best = d;
        best_id = &identity;
      }
    }

  r.distance = best;
  if (best <= threshold) {
    r.matched = true;
    r.identity = *best_id;
  } else {
    r.cause = "above threshold";
  }
  return r;
}

AuthEvent gate_decision(const MatchResult& match) {
  AuthEvent e;
  e.best_distance = match.distance;
  if (match.matched) {
    e.kind = AuthEvent::Kind::granted;
    e.identity = match.identity;
  }
  return e;
}

namespace {

constexpr char kDbMagic[8] = {'W', 'G', 'F', 'A', 'C', 'E', 'D', 'B'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void save_db(const EnrollmentDb& db, const std::filesystem::path& path) {
  std::string out;
  out.append(kDbMagic, sizeof(kDbMagic));
  put_u32(out, db.version);
  put_u64(out, db.created_at);
  put_u32(out, static_cast<std::uint32_t>(db.entries.size()));
  for (const auto& [identity, embeddings] : db.entries) {
    put_u32(out, static_cast<std::uint32_t>(identity.size()));
    out += identity;
    put_u32(out, static_cast<std::uint32_t>(embeddings.size()));
    for (const auto& e : embeddings)
      for (double x : e.v) {
        const float f = static_cast<float>(x);
        char b[4];
        std::memcpy(b, &f, 4);
        out.append(b, 4);
      }
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write: " + path.string());
}

EnrollmentDb load_db(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open database: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) throw FormatError("truncated face database");
  };

  need(sizeof(kDbMagic));
  if (std::memcmp(bytes.data(), kDbMagic, sizeof(kDbMagic)) != 0)
    throw FormatError("not a face database (bad magic)");
  pos += sizeof(kDbMagic);

  EnrollmentDb db;
  need(4);
  db.version = get_u32(bytes.data() + pos);
  pos += 4;
  if (db.version != 1) throw FormatError("unsupported face database version");
  need(8);
  db.created_at = get_u64(bytes.data() + pos);
  pos += 8;
  need(4);
  const std::uint32_t n_ids = get_u32(bytes.data() + pos);
  pos += 4;

  for (std::uint32_t i = 0; i < n_ids; ++i) {
    need(4);
    const std::uint32_t name_len = get_u32(bytes.data() + pos);
    pos += 4;
    need(name_len);
    std::string identity(reinterpret_cast<const char*>(bytes.data() + pos), name_len);
    pos += name_len;
    need(4);
    const std::uint32_t n_emb = get_u32(bytes.data() + pos);
    pos += 4;
    std::vector<FaceEmbedding> list(n_emb);
    for (std::uint32_t e = 0; e < n_emb; ++e) {
      need(4 * FaceEmbedding::kDim);
      for (std::size_t d = 0; d < FaceEmbedding::kDim; ++d) {
        float f;
        std::memcpy(&f, bytes.data() + pos, 4);
        pos += 4;
        list[e].v[d] = static_cast<double>(f);
      }
      // float32 quantization perturbs the norm; validate at that precision
      if (std::abs(list[e].norm() - 1.0) > 1e-5)
        throw FormatError("stored embedding is not unit length");
    }
    if (db.entries.count(identity)) throw FormatError("duplicate identity in database");
    db.entries.emplace(std::move(identity), std::move(list));
  }
  return db;
}

FaceImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path.string());

  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") throw FormatError("not a PGM file: " + path.string());

  auto next_int = [&]() -> long {
    // skip whitespace and '#' comment lines
    while (true) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v;
    if (!(in >> v)) throw FormatError("bad PGM header: " + path.string());
    return v;
  };

  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (w != static_cast<long>(FaceImage::kSide) || h != static_cast<long>(FaceImage::kSide))
    throw InvalidArgument("face images must be 64x64, got " + std::to_string(w) + "x" +
                          std::to_string(h));
  if (maxval <= 0 || maxval > 65535) throw FormatError("bad PGM maxval");

  FaceImage img;
  img.pixels.resize(FaceImage::kPixels);
  img.source_id = path.filename().string();

  if (magic == "P2") {
    for (auto& p : img.pixels) {
      long v;
      if (!(in >> v)) throw FormatError("truncated PGM data");
      p = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(FaceImage::kPixels * static_cast<std::size_t>(bytes_per));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw FormatError("truncated PGM data");
    for (std::size_t i = 0; i < FaceImage::kPixels; ++i) {
      const long v = bytes_per == 1
                         ? raw[i]
                         : (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];  // big-endian
      img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_pgm(const FaceImage& image, const std::filesystem::path& path) {
  if (image.pixels.size() != FaceImage::kPixels) throw InvalidArgument("image must be 64x64");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "P5\n" << FaceImage::kSide << " " << FaceImage::kSide << "\n255\n";
  for (double p : image.pixels) {
    const double clamped = std::min(std::max(p, 0.0), 1.0);
    os.put(static_cast<char>(std::lround(clamped * 255.0)));
  }
}

std::vector<std::pair<std::string, FaceEmbedding>> import_embeddings_text(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings file: " + path.string());
  std::vector<std::pair<std::string, FaceEmbedding>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string identity;
    if (!std::getline(ss, identity, ',') || identity.empty())
      throw FormatError("embeddings line " + std::to_string(lineno) + ": missing identity");
    FaceEmbedding e;
    for (std::size_t d = 0; d < FaceEmbedding::kDim; ++d) {
      std::string field;
      if (!std::getline(ss, field, ','))
        throw FormatError("embeddings line " + std::to_string(lineno) + ": expected 128 values");
      try {
        e.v[d] = std::stod(field);
      } catch (const std::exception&) {
        throw FormatError("embeddings line " + std::to_string(lineno) + ": bad number");
      }
    }
    if (std::abs(e.norm() - 1.0) > 1e-5)
      throw FormatError("embeddings line " + std::to_string(lineno) + ": not unit length");
    out.emplace_back(identity, e);
  }
  return out;
}

}  // namespace wakegate
