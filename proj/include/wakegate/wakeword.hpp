#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wakegate/audio.hpp"
#include "wakegate/mfcc.hpp"

namespace wakegate {

// Enrolled keyword: one MFCC matrix per enrollment utterance.
struct WakeTemplate {
  std::string name;
  std::vector<MfccMatrix> exemplars;
  MfccConfig mfcc;
};

struct DetectionEvent {
  double time_s = 0.0;  // window start in the stream
  double score = 0.0;   // 1 / (1 + dtw), in (0, 1]
  std::string template_name;
};

struct DetectorConfig {
  double position_hop_s = 0.1;
  // candidate window lengths as multiples of each exemplar's length
  std::vector<double> window_scales{0.5, 1.0, 1.5};
  double refractory_s = 0.5;
  double dtw_band_frac = 0.35;
  // windows quieter than this cannot contain the word and score zero
  double energy_gate_dbfs = -60.0;
};

struct ScorePoint {
  double time_s = 0.0;
  double score = 0.0;
};

struct RocPoint {
  double threshold = 0.0;
  double false_alarms_per_hour = 0.0;
  double miss_rate = 0.0;
};

// Builds a template from 0.3..3 s enrollment utterances.
WakeTemplate enroll_template(const std::string& name, const std::vector<AudioBuffer>& utterances,
                             const MfccConfig& config = {});

// Threshold-independent sliding-window match score at every candidate
// position: best (lowest-distance) alignment over exemplars and window
// scales, mapped through 1 / (1 + dtw).
std::vector<ScorePoint> score_track(const AudioBuffer& stream, const WakeTemplate& tmpl,
                                    const DetectorConfig& config = {});

// Peak picking over a score track: a detection is a local maximum within
// +-refractory_s scoring at or above the threshold. Monotone in threshold by
// construction, which keeps ROC curves monotone for any corpus.
std::vector<DetectionEvent> eventize(const std::vector<ScorePoint>& track, double threshold,
                                     double refractory_s, const std::string& template_name);

std::vector<DetectionEvent> detect_stream(const AudioBuffer& stream, const WakeTemplate& tmpl,
                                          double threshold, const DetectorConfig& config = {});

// Sweeps thresholds over labeled corpora: miss rate over the positives,
// detections per hour over the negatives.
std::vector<RocPoint> evaluate_roc(const WakeTemplate& tmpl,
                                   const std::vector<AudioBuffer>& positives,
                                   const std::vector<AudioBuffer>& negatives,
                                   const std::vector<double>& thresholds,
                                   const DetectorConfig& config = {});

// Streaming variant for corpora too large to hold at once. Positive and
// negative entries are WAV paths; negatives may be hours long.
std::vector<RocPoint> evaluate_roc_files(const WakeTemplate& tmpl,
                                         const std::vector<std::filesystem::path>& positives,
                                         const std::vector<std::filesystem::path>& negatives,
                                         const std::vector<double>& thresholds,
                                         const DetectorConfig& config = {},
                                         std::vector<DetectionEvent>* negative_events_out = nullptr,
                                         double lenient_threshold = 0.0);

std::string roc_to_csv(const std::vector<RocPoint>& points);

void save_template(const WakeTemplate& tmpl, const std::filesystem::path& path);
WakeTemplate load_template(const std::filesystem::path& path);

}  // namespace wakegate
