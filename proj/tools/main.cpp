// wakegate: scene synthesis, mic-array processing, enrollment, wake-word
// evaluation, and the authenticated-wakeup attack suite in one binary.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 expectation failure.

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wakegate/audio.hpp"
#include "wakegate/config.hpp"
#include "wakegate/doa.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/face.hpp"
#include "wakegate/json_util.hpp"
#include "wakegate/pipeline.hpp"
#include "wakegate/scenario.hpp"
#include "wakegate/scene_io.hpp"
#include "wakegate/session.hpp"
#include "wakegate/synth.hpp"
#include "wakegate/wakeword.hpp"

namespace fs = std::filesystem;
using namespace wakegate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExpectation = 3;

// Minimal filename glob: * and ? in the last path component.
bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  const fs::path pat(pattern);
  const std::string leaf = pat.filename().string();
  if (leaf.find('*') == std::string::npos && leaf.find('?') == std::string::npos) {
    if (!fs::exists(pat)) throw IoError("no such file: " + pattern);
    return {pat};
  }
  const fs::path dir = pat.has_parent_path() ? pat.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && glob_match(leaf, entry.path().filename().string()))
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("glob matched no files: " + pattern);
  return out;
}

void write_wav_atomic(const AudioBuffer& b, const fs::path& path,
                      WavDepth depth = WavDepth::pcm16) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  write_wav(b, tmp, depth);
  fs::rename(tmp, path);
}

RunConfig load_run_config(const std::string& config_path, std::uint64_t seed_override,
                          bool seed_given, bool freeze) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (seed_given) cfg.seed = seed_override;
  if (freeze) cfg.freeze_timestamps = true;
  return cfg;
}

std::uint64_t now_or_zero(const RunConfig& cfg) {
  return cfg.freeze_timestamps ? 0 : static_cast<std::uint64_t>(std::time(nullptr));
}

int cmd_simulate(const std::string& scene_path, const std::string& out_dir) {
  LoadedScene loaded = load_scene(scene_path);
  const SceneOutput out = simulate_scene(loaded.scene, loaded.geometry);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_wav_atomic(out.mics, dir / "mics.wav");
  if (!out.truth.clean_target.empty()) write_wav_atomic(out.truth.clean_target, dir / "clean.wav");
  if (!out.truth.echo_only.empty() && out.truth.echo_only.peak() > 0.0)
    write_wav_atomic(out.truth.echo_only, dir / "echo.wav");
  write_json(dir / "truth.json", truth_to_json(out.truth));
  std::cout << "scene: " << out.mics.channel_count() << " mics, " << out.mics.frame_count()
            << " samples -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_process(const std::string& in_wav, const std::string& reference_wav,
                const std::string& out_dir, const RunConfig& cfg) {
  const AudioBuffer mics = read_wav(in_wav);
  std::optional<AudioBuffer> ref;
  if (!reference_wav.empty()) ref = read_wav(reference_wav);

  const ChannelBundle bundle = process_pipeline(mics, ref, cfg.dsp, ArrayGeometry::circular());

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_wav_atomic(bundle.ch0, dir / "ch0.wav");
  write_wav_atomic(bundle.to_multichannel(), dir / "bundle.wav");
  atomic_write(dir / "doa_track.txt", doa_track_to_text(bundle.doa_track));
  std::cout << "processed " << mics.frame_count() << " samples"
            << (bundle.aec_engaged ? " (aec engaged)" : "") << " -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_enroll_face(const std::string& db_path, const std::string& identity,
                    const std::string& image_glob, const std::string& embeddings_path,
                    bool replace, const RunConfig& cfg) {
  EnrollmentDb db;
  if (fs::exists(db_path)) db = load_db(db_path);
  if (replace) db.entries.erase(identity);

  const Embedder embedder(cfg.embedder_seed);
  std::size_t added = 0;
  if (!image_glob.empty()) {
    std::vector<FaceImage> images;
    for (const auto& p : expand_glob(image_glob)) images.push_back(read_pgm(p));
    enroll(db, identity, images, embedder);
    added += images.size();
  }
  if (!embeddings_path.empty()) {
    for (const auto& [id, emb] : import_embeddings_text(embeddings_path)) {
      enroll_embeddings(db, id.empty() ? identity : id, {emb});
      ++added;
    }
  }
  if (added == 0) throw InvalidArgument("nothing to enroll: give --images or --embeddings");

  db.created_at = now_or_zero(cfg);
  save_db(db, db_path);
  std::cout << "enrolled " << added << " embedding(s); database now holds "
            << db.embedding_count() << " across " << db.entries.size() << " identit"
            << (db.entries.size() == 1 ? "y" : "ies") << "\n";
  return kExitOk;
}

int cmd_enroll_wake(const std::string& store_path, const std::string& name,
                    const std::string& wav_glob, const RunConfig& cfg) {
  std::vector<AudioBuffer> takes;
  for (const auto& p : expand_glob(wav_glob)) {
    AudioBuffer b = read_wav(p);
    if (b.sample_rate() != kCanonicalRate)
      throw FormatError("enrollment wav must be at 16000 Hz: " + p.string());
    if (b.channel_count() != 1) throw FormatError("enrollment wav must be mono: " + p.string());
    takes.push_back(std::move(b));
  }
  const WakeTemplate tmpl = enroll_template(name, takes, cfg.mfcc);
  save_template(tmpl, store_path);
  std::cout << "template '" << name << "' with " << tmpl.exemplars.size() << " exemplar(s) -> "
            << store_path << "\n";
  return kExitOk;
}

struct Manifest {
  std::vector<fs::path> positives;
  std::vector<fs::path> negatives;
};

// One `positive <path>` or `negative <path>` per line; # starts a comment.
Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string label, file;
    ss >> label;
    std::getline(ss, file);
    const auto first = file.find_first_not_of(" \t");
    if (first == std::string::npos)
      throw FormatError("manifest line " + std::to_string(lineno) + ": missing path");
    file = file.substr(first);
    fs::path p(file);
    if (!p.is_absolute()) p = base / p;
    if (label == "positive")
      m.positives.push_back(p);
    else if (label == "negative")
      m.negatives.push_back(p);
    else
      throw FormatError("manifest line " + std::to_string(lineno) + ": label must be positive|negative");
  }
  if (m.positives.empty()) throw FormatError("manifest has no positives");
  if (m.negatives.empty()) throw FormatError("manifest has no negatives");
  return m;
}

int cmd_eval_roc(const std::string& manifest_path, const std::string& template_path,
                 const std::string& thresholds_arg, const std::string& out_csv,
                 const std::string& log_path, const RunConfig& cfg) {
  const Manifest manifest = load_manifest(manifest_path);
  const WakeTemplate tmpl = load_template(template_path);

  std::vector<double> thresholds;
  std::istringstream ss(thresholds_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      thresholds.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InvalidArgument("bad threshold: '" + tok + "'");
    }
  }
  if (thresholds.empty()) throw InvalidArgument("no thresholds given");
  std::sort(thresholds.begin(), thresholds.end());

  std::vector<DetectionEvent> neg_events;
  const auto roc = evaluate_roc_files(tmpl, manifest.positives, manifest.negatives, thresholds,
                                      cfg.detector, log_path.empty() ? nullptr : &neg_events,
                                      thresholds.front());
  atomic_write(out_csv, roc_to_csv(roc));

  if (!log_path.empty()) {
    std::ostringstream os;
    for (const auto& e : neg_events) {
      Json j;
      j["time_s"] = e.time_s;
      j["score"] = e.score;
      j["template"] = e.template_name;
      os << j.dump() << "\n";
    }
    atomic_write(log_path, os.str());
  }
  std::cout << "roc: " << roc.size() << " operating points -> " << out_csv << "\n";
  return kExitOk;
}

int cmd_attack_suite(const std::string& out_report, const std::string& scenarios_dir,
                     const RunConfig& cfg) {
  const SuiteAssets assets(cfg.seed);

  std::vector<AttackScenario> scenarios;
  if (!scenarios_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(scenarios_dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) scenarios.push_back(load_scenario(f, assets));
    if (scenarios.empty()) throw IoError("no scenario files in " + scenarios_dir);
  } else {
    scenarios = builtin_scenarios(assets);
  }

  SessionConfig on = cfg.session;
  on.gate_enabled = true;
  SessionConfig off = cfg.session;
  off.gate_enabled = false;

  SuiteReport report =
      run_attack_suite(scenarios, on, off, assets.db, assets.wake, cfg.detector);
  report.generated_at = now_or_zero(cfg);
  write_json(out_report, report_to_json(report, scenarios));

  std::cout << "gate on:  " << report.blocked_with_gate << "/" << scenarios.size()
            << " blocked\n";
  std::cout << "gate off: " << report.allowed_without_gate << "/" << scenarios.size()
            << " allowed\n";
  std::cout << (report.expectations_met ? "all expectations met" : "EXPECTATIONS NOT MET")
            << " -> " << out_report << "\n";
  return report.expectations_met ? kExitOk : kExitExpectation;
}

int cmd_run_pipeline(const std::string& in_wav, const std::string& reference_wav,
                     const std::string& db_path, const std::string& template_path,
                     const std::string& faces_path, const std::string& out_dir,
                     const RunConfig& cfg) {
  const AudioBuffer mics = read_wav(in_wav);
  std::optional<AudioBuffer> ref;
  if (!reference_wav.empty()) ref = read_wav(reference_wav);

  const EnrollmentDb db = load_db(db_path);
  const WakeTemplate tmpl = load_template(template_path);
  const Embedder embedder(cfg.embedder_seed);

  const ChannelBundle bundle = process_pipeline(mics, ref, cfg.dsp, ArrayGeometry::circular());
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_wav_atomic(bundle.ch0, dir / "ch0.wav");
  atomic_write(dir / "doa_track.txt", doa_track_to_text(bundle.doa_track));

  // assemble the event timeline: faces, detections on ch0, audio chunks
  struct Timed {
    double t;
    int order;
    Event event;
  };
  std::vector<Timed> timeline;

  if (!faces_path.empty()) {
    const Json fj = load_json(faces_path);
    require_keys(fj, {"schema_version", "events"}, "faces");
    const fs::path base =
        fs::path(faces_path).has_parent_path() ? fs::path(faces_path).parent_path() : fs::path(".");
    for (const auto& e : fj.at("events")) {
      require_keys(e, {"t", "image"}, "face event");
      const fs::path img = e.at("image").get<std::string>();
      const double t = e.at("t").get<double>();
      timeline.push_back(
          {t, 2, FaceObserved{embedder.embed(read_pgm(img.is_absolute() ? img : base / img)), t}});
    }
  }

  double exemplar_s = 0.0;
  for (const auto& ex : tmpl.exemplars)
    exemplar_s = std::max(exemplar_s, static_cast<double>(ex.size()) * tmpl.mfcc.hop_s);
  for (const auto& det : detect_stream(bundle.ch0, tmpl, cfg.session.wake_threshold, cfg.detector)) {
    const double t = det.time_s + exemplar_s;
    timeline.push_back({t, 1, WakeDetected{det.score, t}});
  }

  const auto& ch0 = bundle.ch0.channel_vec(0);
  const auto chunk = static_cast<std::size_t>(0.1 * cfg.session.sample_rate);
  Endpointer ep;
  for (std::size_t off = 0; off < ch0.size(); off += chunk) {
    const std::size_t len = std::min(chunk, ch0.size() - off);
    const double t_end = static_cast<double>(off + len) / cfg.session.sample_rate;
    std::vector<double> part(ch0.begin() + static_cast<std::ptrdiff_t>(off),
                             ch0.begin() + static_cast<std::ptrdiff_t>(off + len));
    timeline.push_back({t_end, 0, AudioChunk{std::move(part), t_end}});
    if (auto eos = ep.feed(std::span<const double>(ch0).subspan(off, len),
                           static_cast<double>(off) / cfg.session.sample_rate))
      timeline.push_back({*eos, 2, EndOfSpeech{*eos}});
  }
  const double horizon = bundle.ch0.duration_s() + 1.0;
  timeline.push_back({horizon, 3, Tick{horizon}});

  std::stable_sort(timeline.begin(), timeline.end(),
                   [](const Timed& a, const Timed& b) { return a.t < b.t || (a.t == b.t && a.order < b.order); });

  // steer the feedback pointer from the confident portion of the track
  std::optional<double> pointer_az;
  double best_conf = 0.0;
  for (const auto& p : bundle.doa_track)
    if (p.has_source && p.confidence > best_conf) {
      best_conf = p.confidence;
      pointer_az = p.azimuth_deg;
    }

  Session session(cfg.session, &db);
  std::size_t utterances = 0;
  std::ostringstream feedback;
  for (const auto& te : timeline) {
    const auto actions = session.handle(te.event);
    for (const auto& a : actions) {
      if (a.kind == Action::Kind::utterance_finished) {
        write_wav_atomic(a.utterance,
                         dir / ("utterance_" + std::to_string(utterances++) + ".wav"));
      }
      if (a.kind == Action::Kind::ring_green || a.kind == Action::Kind::ring_off) {
        const FeedbackState f = feedback_for(session.state(), pointer_az);
        Json j;
        j["t"] = a.t;
        j["ring"] = a.kind == Action::Kind::ring_green ? "green" : "off";
        if (f.pointer) j["pointer_slot"] = *f.pointer;
        feedback << j.dump() << "\n";
      }
    }
  }

  atomic_write(dir / "audit.jsonl", audit_to_jsonl(session.audit()));
  atomic_write(dir / "feedback.jsonl", feedback.str());
  std::cout << "pipeline run: " << utterances << " utterance(s) streamed -> " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wakegate: face-gated smart-speaker pipeline workbench\n"
      "File formats are documented in FORMATS.md."};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  bool freeze = false;
  app.add_option("--config", config_path, "JSON config file (strict keys)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for all randomness");
  app.add_flag("--freeze-timestamps", freeze, "write zero timestamps for reproducible output");

  // simulate
  auto* sim = app.add_subcommand("simulate", "render a scene file to a multichannel WAV + truth");
  std::string scene_path, out_dir = "out";
  sim->add_option("scene", scene_path, "scene JSON file")->required();
  sim->add_option("--out", out_dir, "output directory");

  // process
  auto* proc = app.add_subcommand("process", "run the mic-array front-end over a 4-channel WAV");
  std::string in_wav, reference_wav, proc_out = "out";
  proc->add_option("input", in_wav, "4-channel input WAV")->required();
  proc->add_option("--reference", reference_wav, "loudspeaker reference WAV (enables AEC)");
  proc->add_option("--out", proc_out, "output directory");

  // enroll-face
  auto* ef = app.add_subcommand("enroll-face", "add face images to the enrollment database");
  std::string db_path, identity, image_glob, embeddings_path;
  bool replace = false;
  ef->add_option("--db", db_path, "database file")->required();
  ef->add_option("--identity", identity, "identity to enroll")->required();
  ef->add_option("--images", image_glob, "PGM glob (64x64)");
  ef->add_option("--embeddings", embeddings_path, "precomputed embeddings text file");
  ef->add_flag("--replace", replace, "replace the identity instead of appending");

  // enroll-wake
  auto* ew = app.add_subcommand("enroll-wake", "build a wake-word template from utterance WAVs");
  std::string store_path, wake_name, wav_glob;
  ew->add_option("--store", store_path, "template file to write")->required();
  ew->add_option("--name", wake_name, "template name")->required();
  ew->add_option("--wavs", wav_glob, "enrollment WAV glob")->required();

  // eval-roc
  auto* roc = app.add_subcommand("eval-roc", "sweep detection thresholds over a labeled corpus");
  std::string manifest_path, template_path, thresholds_arg, out_csv = "roc.csv", log_path;
  roc->add_option("--manifest", manifest_path, "corpus manifest")->required();
  roc->add_option("--template", template_path, "wake template")->required();
  roc->add_option("--thresholds", thresholds_arg, "comma-separated thresholds")->required();
  roc->add_option("--out", out_csv, "output CSV");
  roc->add_option("--log", log_path, "negative-corpus detection log (JSON lines)");

  // attack-suite
  auto* suite = app.add_subcommand("attack-suite", "replay the seven threat scenarios gate on/off");
  std::string report_path = "attack_report.json", scenarios_dir;
  suite->add_option("--out", report_path, "report JSON");
  suite->add_option("--scenarios", scenarios_dir, "directory of scenario scripts (default: built-ins)");

  // run-pipeline
  auto* run = app.add_subcommand("run-pipeline", "front-end + detector + gated session end to end");
  std::string rp_in, rp_ref, rp_db, rp_template, rp_faces, rp_out = "out";
  run->add_option("input", rp_in, "4-channel input WAV")->required();
  run->add_option("--reference", rp_ref, "loudspeaker reference WAV");
  run->add_option("--db", rp_db, "face enrollment database")->required();
  run->add_option("--template", rp_template, "wake template")->required();
  run->add_option("--faces", rp_faces, "face observation events JSON");
  run->add_option("--out", rp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    const RunConfig cfg = load_run_config(config_path, seed, seed_opt->count() > 0, freeze);
    if (sim->parsed()) return cmd_simulate(scene_path, out_dir);
    if (proc->parsed()) return cmd_process(in_wav, reference_wav, proc_out, cfg);
    if (ef->parsed())
      return cmd_enroll_face(db_path, identity, image_glob, embeddings_path, replace, cfg);
    if (ew->parsed()) return cmd_enroll_wake(store_path, wake_name, wav_glob, cfg);
    if (roc->parsed())
      return cmd_eval_roc(manifest_path, template_path, thresholds_arg, out_csv, log_path, cfg);
    if (suite->parsed()) return cmd_attack_suite(report_path, scenarios_dir, cfg);
    if (run->parsed())
      return cmd_run_pipeline(rp_in, rp_ref, rp_db, rp_template, rp_faces, rp_out, cfg);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
