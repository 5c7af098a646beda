#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "oracles.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/face.hpp"
#include "wakegate/rng.hpp"

using namespace wakegate;
namespace fs = std::filesystem;

namespace {

FaceImage random_image(Rng& rng, const std::string& id) {
  FaceImage img;
  img.source_id = id;
  img.pixels.resize(FaceImage::kPixels);
  for (auto& p : img.pixels) p = rng.uniform();
  return img;
}

FaceImage jitter(const FaceImage& base, Rng& rng, double amount = 0.01) {
  FaceImage img = base;
  for (auto& p : img.pixels) p = std::clamp(p + amount * rng.normal(), 0.0, 1.0);
  return img;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "wakegate_test_face";
  fs::create_directories(dir);
  return dir;
}

// Plain linear scan written independently of recognize().
std::pair<std::string, double> nn_oracle(const EnrollmentDb& db, const FaceEmbedding& q) {
  double best = 1e300;
  std::string best_id;
  for (const auto& [id, list] : db.entries)
    for (const auto& e : list) {
      double acc = 0.0;
      for (std::size_t i = 0; i < FaceEmbedding::kDim; ++i)
        acc += (q.v[i] - e.v[i]) * (q.v[i] - e.v[i]);
      const double d = std::sqrt(acc);
      if (d < best || (d == best && id < best_id)) {
        best = d;
        best_id = id;
      }
    }
  return {best_id, best};
}

}  // namespace

TEST_CASE("embed: deterministic and unit length") {
  Rng rng(1);
  const Embedder embedder(42);
  const FaceImage img = random_image(rng, "a");
  const FaceEmbedding e1 = embedder.embed(img);
  const FaceEmbedding e2 = embedder.embed(img);
  for (std::size_t i = 0; i < FaceEmbedding::kDim; ++i) CHECK(e1.v[i] == e2.v[i]);
  CHECK(std::abs(e1.norm() - 1.0) < 1e-9);
}

TEST_CASE("embed: unrelated images land far apart") {
  // near-orthogonality under the projection; 100 seeded pairs
  const Embedder embedder(42);
  Rng rng(2);
  double sum_sq = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto a = embedder.embed(random_image(rng, "x"));
    const auto b = embedder.embed(random_image(rng, "y"));
    const double d = embedding_distance(a, b);
    CHECK(d > 1.0);
    sum_sq += d * d;
  }
  // mean squared distance should sit near 2
  CHECK(sum_sq / 100.0 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("embed: same face's shots stay close") {
  const Embedder embedder(42);
  Rng rng(3);
  const FaceImage base = random_image(rng, "base");
  const auto e0 = embedder.embed(base);
  for (int i = 0; i < 10; ++i) {
    const auto ei = embedder.embed(jitter(base, rng));
    CHECK(embedding_distance(e0, ei) < 0.2);
  }
}

TEST_CASE("embed: rejects wrong sizes and degenerate images") {
  const Embedder embedder(1);
  FaceImage small;
  small.pixels.assign(16, 0.5);
  CHECK_THROWS_AS(embedder.embed(small), InvalidArgument);

  FaceImage flat;
  flat.pixels.assign(FaceImage::kPixels, 0.7);  // constant: no direction after centering
  CHECK_THROWS_AS(embedder.embed(flat), InvalidArgument);
}

TEST_CASE("enroll: append semantics") {
  const Embedder embedder(42);
  Rng rng(4);
  EnrollmentDb db;
  enroll(db, "alice", {random_image(rng, "a1"), random_image(rng, "a2")}, embedder);
  CHECK(db.entries.at("alice").size() == 2);
  enroll(db, "alice", {random_image(rng, "a3")}, embedder);
  CHECK(db.entries.at("alice").size() == 3);
  CHECK(db.embedding_count() == 3);

  CHECK_THROWS_AS(enroll(db, "bob", {}, embedder), InvalidArgument);
}

TEST_CASE("recognize: stored embedding matches itself at distance zero") {
  const Embedder embedder(42);
  Rng rng(5);
  EnrollmentDb db;
  const FaceImage img = random_image(rng, "a");
  enroll(db, "alice", {img}, embedder);
  const MatchResult r = recognize(db, embedder.embed(img), 0.6);
  CHECK(r.matched);
  CHECK(r.identity == "alice");
  CHECK(r.distance == 0.0);
}

TEST_CASE("recognize: empty database is a distinct unmatched outcome") {
  const Embedder embedder(42);
  Rng rng(6);
  const MatchResult r = recognize(EnrollmentDb{}, embedder.embed(random_image(rng, "q")), 0.6);
  CHECK_FALSE(r.matched);
  CHECK(r.cause == "empty database");
  CHECK(std::isinf(r.distance));
}

TEST_CASE("recognize: agrees with the exhaustive scan oracle") {
  const Embedder embedder(7);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    EnrollmentDb db;
    const std::size_t ids = 1 + rng.index(10);
    for (std::size_t i = 0; i < ids; ++i) {
      std::vector<FaceImage> imgs;
      const std::size_t n = 1 + rng.index(3);
      for (std::size_t k = 0; k < n; ++k)
        imgs.push_back(random_image(rng, "img"));
      enroll(db, "id" + std::to_string(i), imgs, embedder);
    }
    const auto q = embedder.embed(random_image(rng, "q"));
    const MatchResult got = recognize(db, q, 10.0);  // huge threshold: always matches
    const auto [want_id, want_d] = nn_oracle(db, q);
    REQUIRE(got.matched);
    CHECK(*got.identity == want_id);
    CHECK(got.distance == doctest::Approx(want_d).epsilon(1e-12));
  }
}

TEST_CASE("recognize: enrollment monotonicity") {
  const Embedder embedder(8);
  Rng rng(8);
  EnrollmentDb db;
  enroll(db, "a", {random_image(rng, "a")}, embedder);
  const auto q = embedder.embed(random_image(rng, "q"));
  double prev = recognize(db, q, 10.0).distance;
  for (int i = 0; i < 8; ++i) {
    enroll(db, "b" + std::to_string(i), {random_image(rng, "b")}, embedder);
    const double d = recognize(db, q, 10.0).distance;
    CHECK(d <= prev + 1e-15);
    prev = d;
  }
}

TEST_CASE("embedding distances form a metric") {
  const Embedder embedder(9);
  Rng rng(9);
  const auto a = embedder.embed(random_image(rng, "a"));
  const auto b = embedder.embed(random_image(rng, "b"));
  const auto c = embedder.embed(random_image(rng, "c"));
  CHECK(embedding_distance(a, a) == 0.0);
  CHECK(embedding_distance(a, b) == embedding_distance(b, a));
  CHECK(embedding_distance(a, c) <= embedding_distance(a, b) + embedding_distance(b, c) + 1e-12);
}

TEST_CASE("gate: granted mirrors the match, denied keeps the distance") {
  MatchResult m;
  m.matched = true;
  m.identity = "alice";
  m.distance = 0.3;
  const AuthEvent g = gate_decision(m);
  CHECK(g.kind == AuthEvent::Kind::granted);
  CHECK(g.identity == "alice");

  MatchResult u;
  u.matched = false;
  u.distance = 0.9;
  const AuthEvent d = gate_decision(u);
  CHECK(d.kind == AuthEvent::Kind::denied);
  CHECK_FALSE(d.identity.has_value());
  CHECK(d.best_distance == doctest::Approx(0.9));
}

TEST_CASE("gate: unenrolled face denied end to end") {
  const Embedder embedder(10);
  Rng rng(10);
  EnrollmentDb db;
  enroll(db, "owner", {random_image(rng, "o1"), random_image(rng, "o2")}, embedder);
  const auto stranger = embedder.embed(random_image(rng, "s"));
  const AuthEvent e = gate_decision(recognize(db, stranger, 0.6));
  CHECK(e.kind == AuthEvent::Kind::denied);
}

TEST_CASE("db: save and load round trip, byte-identical on resave") {
  const Embedder embedder(11);
  Rng rng(11);
  EnrollmentDb db;
  db.created_at = 1700000000;
  enroll(db, "alice", {random_image(rng, "a1"), random_image(rng, "a2")}, embedder);
  enroll(db, "bob", {random_image(rng, "b1")}, embedder);

  const fs::path p1 = temp_dir() / "db1.bin";
  const fs::path p2 = temp_dir() / "db2.bin";
  save_db(db, p1);
  const EnrollmentDb loaded = load_db(p1);
  CHECK(loaded.entries.size() == 2);
  CHECK(loaded.created_at == 1700000000);
  save_db(loaded, p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);

  // float32 records: loaded values match to float precision
  const auto& orig = db.entries.at("alice")[0];
  const auto& back = loaded.entries.at("alice")[0];
  for (std::size_t i = 0; i < FaceEmbedding::kDim; ++i)
    CHECK(back.v[i] == doctest::Approx(orig.v[i]).epsilon(1e-6));
}

TEST_CASE("db: corrupt files are format errors") {
  const fs::path p = temp_dir() / "corrupt.bin";
  {
    std::ofstream os(p, std::ios::binary);
    os << "WGFACEDBgarbage";
  }
  CHECK_THROWS_AS(load_db(p), FormatError);
  {
    std::ofstream os(p, std::ios::binary);
    os << "NOTMAGIC00000000";
  }
  CHECK_THROWS_AS(load_db(p), FormatError);
  CHECK_THROWS_AS(load_db(temp_dir() / "missing.bin"), IoError);
}

TEST_CASE("pgm: write, read, embed") {
  Rng rng(12);
  const FaceImage img = random_image(rng, "pgm");
  const fs::path p = temp_dir() / "face.pgm";
  write_pgm(img, p);
  const FaceImage back = read_pgm(p);
  REQUIRE(back.pixels.size() == FaceImage::kPixels);
  for (std::size_t i = 0; i < FaceImage::kPixels; ++i)
    CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= 0.5 / 255.0 + 1e-12);

  // ascii variant reads too
  const fs::path pa = temp_dir() / "face_ascii.pgm";
  {
    std::ofstream os(pa);
    os << "P2\n# comment line\n64 64\n255\n";
    for (std::size_t i = 0; i < FaceImage::kPixels; ++i) os << (i % 251) << "\n";
  }
  const FaceImage ascii = read_pgm(pa);
  CHECK(ascii.pixels[1] == doctest::Approx(1.0 / 255.0));

  const fs::path bad = temp_dir() / "bad.pgm";
  {
    std::ofstream os(bad);
    os << "P5\n32 32\n255\n";
    for (int i = 0; i < 32 * 32; ++i) os.put(char(i & 0xff));
  }
  CHECK_THROWS_AS(read_pgm(bad), InvalidArgument);  // wrong size
}

TEST_CASE("embeddings text import") {
  const Embedder embedder(13);
  Rng rng(13);
  const auto e = embedder.embed(random_image(rng, "t"));
  const fs::path p = temp_dir() / "emb.txt";
  {
    std::ofstream os(p);
    os << "# precomputed\n";
    os << "carol";
    for (double v : e.v) os << "," << std::setprecision(17) << v;
    os << "\n";
  }
  const auto rows = import_embeddings_text(p);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].first == "carol");
  CHECK(embedding_distance(rows[0].second, e) < 1e-12);

  const fs::path bad = temp_dir() / "emb_bad.txt";
  {
    std::ofstream os(bad);
    os << "dave,0.5,0.5\n";  // far too few values
  }
  CHECK_THROWS_AS(import_embeddings_text(bad), FormatError);
}
