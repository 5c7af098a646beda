#include "wakegate/wakeword.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "wakegate/dtw.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/json_util.hpp"
#include "wakegate/synth.hpp"

namespace wakegate {

WakeTemplate enroll_template(const std::string& name, const std::vector<AudioBuffer>& utterances,
                             const MfccConfig& config) {
  if (utterances.empty()) throw InvalidArgument("enrollment needs at least one utterance");
  WakeTemplate t;
  t.name = name;
  t.mfcc = config;
  for (const auto& u : utterances) {
    const double dur = u.duration_s();
    if (dur < 0.3 || dur > 3.0)
      throw InvalidArgument("enrollment utterances must be 0.3 to 3 seconds");
    t.exemplars.push_back(extract_mfcc(u, config));
  }
  return t;
}

std::vector<ScorePoint> score_track(const AudioBuffer& stream, const WakeTemplate& tmpl,
                                    const DetectorConfig& config) {
  if (tmpl.exemplars.empty()) throw InvalidArgument("template has no exemplars");
  if (stream.channel_count() != 1) throw InvalidArgument("detector expects a mono stream");

  const MfccMatrix feats = extract_mfcc(stream, tmpl.mfcc);
  const std::size_t total = feats.size();

  std::size_t min_window = SIZE_MAX;
  for (const auto& ex : tmpl.exemplars)
    for (double s : config.window_scales)
      min_window = std::min(min_window,
                            std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(
                                                         s * static_cast<double>(ex.size())))));
  if (total < min_window) throw InvalidArgument("stream shorter than the template");

  // window energies via prefix sums, for the silence gate
  const auto x = stream.channel(0);
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  const auto hop_samples = static_cast<std::size_t>(std::lround(tmpl.mfcc.hop_s * stream.sample_rate()));
  const double gate_rms = amplitude_of_db(config.energy_gate_dbfs);

  const auto pos_step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.position_hop_s / tmpl.mfcc.hop_s)));

  std::vector<ScorePoint> track;
  for (std::size_t pos = 0; pos + min_window <= total; pos += pos_step) {
    ScorePoint pt;
    pt.time_s = static_cast<double>(pos) * tmpl.mfcc.hop_s;

    double best = std::numeric_limits<double>::infinity();
    for (const auto& ex : tmpl.exemplars) {
      for (double s : config.window_scales) {
        const auto win = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::lround(s * static_cast<double>(ex.size()))));
        if (pos + win > total) continue;

        const std::size_t lo = pos * hop_samples;
        const std::size_t hi = std::min(x.size(), (pos + win) * hop_samples);
        const double win_rms =
            std::sqrt((prefix[hi] - prefix[lo]) / static_cast<double>(std::max<std::size_t>(hi - lo, 1)));
        if (win_rms < gate_rms) continue;  // too quiet to contain the word

        MfccMatrix slice(feats.begin() + static_cast<std::ptrdiff_t>(pos),
                         feats.begin() + static_cast<std::ptrdiff_t>(pos + win));
        best = std::min(best, dtw_distance_banded(slice, ex, config.dtw_band_frac));
      }
    }
    pt.score = std::isfinite(best) ? 1.0 / (1.0 + best) : 0.0;
    track.push_back(pt);
  }
  return track;
}

std::vector<DetectionEvent> eventize(const std::vector<ScorePoint>& track, double threshold,
                                     double refractory_s, const std::string& template_name) {
  std::vector<DetectionEvent> events;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (track[i].score < threshold || track[i].score <= 0.0) continue;
    // local maximum within the refractory span; ties resolve to the latest
    bool is_peak = true;
    for (std::size_t j = i; j-- > 0;) {
      if (track[i].time_s - track[j].time_s > refractory_s) break;
      if (track[j].score > track[i].score) {
        is_peak = false;
        break;
      }
    }
    for (std::size_t j = i + 1; is_peak && j < track.size(); ++j) {
      if (track[j].time_s - track[i].time_s > refractory_s) break;
      if (track[j].score >= track[i].score) is_peak = false;
    }
    if (is_peak) events.push_back({track[i].time_s, track[i].score, template_name});
  }
  return events;
}

std::vector<DetectionEvent> detect_stream(const AudioBuffer& stream, const WakeTemplate& tmpl,
                                          double threshold, const DetectorConfig& config) {
  return eventize(score_track(stream, tmpl, config), threshold, config.refractory_s, tmpl.name);
}

namespace {

std::vector<RocPoint> roc_from_tracks(const std::vector<std::vector<ScorePoint>>& pos_tracks,
                                      const std::vector<std::vector<ScorePoint>>& neg_tracks,
                                      double neg_hours, const std::vector<double>& thresholds,
                                      const DetectorConfig& config, const std::string& name) {
  std::vector<RocPoint> out;
  for (double th : thresholds) {
    RocPoint p;
    p.threshold = th;
    std::size_t hits = 0;
    for (const auto& t : pos_tracks) {
      double peak = 0.0;
      for (const auto& sp : t) peak = std::max(peak, sp.score);
      if (peak >= th) ++hits;
    }
    p.miss_rate = 1.0 - static_cast<double>(hits) / static_cast<double>(pos_tracks.size());
    std::size_t fa = 0;
    for (const auto& t : neg_tracks) fa += eventize(t, th, config.refractory_s, name).size();
    p.false_alarms_per_hour = neg_hours > 0.0 ? static_cast<double>(fa) / neg_hours : 0.0;
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<RocPoint> evaluate_roc(const WakeTemplate& tmpl,
                                   const std::vector<AudioBuffer>& positives,
                                   const std::vector<AudioBuffer>& negatives,
                                   const std::vector<double>& thresholds,
                                   const DetectorConfig& config) {
  if (positives.empty()) throw InvalidArgument("roc needs a positive corpus");
  if (negatives.empty()) throw InvalidArgument("roc needs a negative corpus");
  if (thresholds.empty()) throw InvalidArgument("roc needs thresholds");

  std::vector<std::vector<ScorePoint>> pos_tracks, neg_tracks;
  double neg_hours = 0.0;
  for (const auto& p : positives) pos_tracks.push_back(score_track(p, tmpl, config));
  for (const auto& n : negatives) {
    neg_tracks.push_back(score_track(n, tmpl, config));
    neg_hours += n.duration_s() / 3600.0;
  }
  return roc_from_tracks(pos_tracks, neg_tracks, neg_hours, thresholds, config, tmpl.name);
}

std::vector<RocPoint> evaluate_roc_files(const WakeTemplate& tmpl,
                                         const std::vector<std::filesystem::path>& positives,
                                         const std::vector<std::filesystem::path>& negatives,
                                         const std::vector<double>& thresholds,
                                         const DetectorConfig& config,
                                         std::vector<DetectionEvent>* negative_events_out,
                                         double lenient_threshold) {
  if (positives.empty()) throw InvalidArgument("roc needs a positive corpus");
  if (negatives.empty()) throw InvalidArgument("roc needs a negative corpus");
  if (thresholds.empty()) throw InvalidArgument("roc needs thresholds");

  std::vector<std::vector<ScorePoint>> pos_tracks, neg_tracks;
  double neg_hours = 0.0;
  for (const auto& p : positives) pos_tracks.push_back(score_track(read_wav(p), tmpl, config));
  for (const auto& n : negatives) {
    const AudioBuffer buf = read_wav(n);  // one at a time; these can be hours
    neg_hours += buf.duration_s() / 3600.0;
    neg_tracks.push_back(score_track(buf, tmpl, config));
  }
  if (negative_events_out) {
    negative_events_out->clear();
    for (const auto& t : neg_tracks) {
      auto ev = eventize(t, lenient_threshold, config.refractory_s, tmpl.name);
      negative_events_out->insert(negative_events_out->end(), ev.begin(), ev.end());
    }
  }
  return roc_from_tracks(pos_tracks, neg_tracks, neg_hours, thresholds, config, tmpl.name);
}

std::string roc_to_csv(const std::vector<RocPoint>& points) {
  std::ostringstream os;
  os << "threshold,fa_per_hour,miss_rate\n";
  for (const auto& p : points) {
    char line[96];
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", p.threshold, p.false_alarms_per_hour,
                  p.miss_rate);
    os << line;
  }
  return os.str();
}

void save_template(const WakeTemplate& tmpl, const std::filesystem::path& path) {
  Json j;
  j["schema_version"] = 1;
  j["name"] = tmpl.name;
  j["mfcc"] = {{"n_coeffs", tmpl.mfcc.n_coeffs},   {"window_s", tmpl.mfcc.window_s},
               {"hop_s", tmpl.mfcc.hop_s},         {"n_mels", tmpl.mfcc.n_mels},
               {"fmin_hz", tmpl.mfcc.fmin_hz},     {"fmax_hz", tmpl.mfcc.fmax_hz},
               {"log_floor", tmpl.mfcc.log_floor}};
  j["exemplars"] = tmpl.exemplars;
  write_json(path, j);
}

WakeTemplate load_template(const std::filesystem::path& path) {
  const Json j = load_json(path);
  require_keys(j, {"schema_version", "name", "mfcc", "exemplars"}, "wake template");
  if (j.value("schema_version", 0) != 1) throw FormatError("wake template: unsupported schema_version");
  WakeTemplate t;
  t.name = j.at("name").get<std::string>();
  const auto& m = j.at("mfcc");
  require_keys(m, {"n_coeffs", "window_s", "hop_s", "n_mels", "fmin_hz", "fmax_hz", "log_floor"},
               "wake template mfcc");
  t.mfcc.n_coeffs = m.at("n_coeffs").get<int>();
  t.mfcc.window_s = m.at("window_s").get<double>();
  t.mfcc.hop_s = m.at("hop_s").get<double>();
  t.mfcc.n_mels = m.at("n_mels").get<int>();
  t.mfcc.fmin_hz = m.at("fmin_hz").get<double>();
  t.mfcc.fmax_hz = m.at("fmax_hz").get<double>();
  t.mfcc.log_floor = m.at("log_floor").get<double>();
  t.exemplars = j.at("exemplars").get<std::vector<MfccMatrix>>();
  if (t.exemplars.empty()) throw FormatError("wake template has no exemplars");
  return t;
}

}  // namespace wakegate
