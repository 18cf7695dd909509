#pragma once

// Seeded synthetic gesture dataset: user profiles, per-class parameter
// draws, NRAD event files and the line-oriented JSON manifest.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/baseline_fft.hpp"
#include "neurorad/error.hpp"
#include "neurorad/gesture.hpp"
#include "neurorad/nrad_format.hpp"
#include "neurorad/radar_synth.hpp"
#include "neurorad/rng.hpp"

namespace neurorad {

/// Emulated user: preferred standing distance plus where in each class's
/// amplitude and frequency range they tend to sit (0 = low end, 1 = high end).
struct UserProfile {
  double r0;
  double size_bias;
  double speed_bias;
};

inline constexpr std::array<UserProfile, 7> kUserProfiles = {{
    {0.45, 0.5, 0.5},
    {0.43, 0.1, 0.8},
    {0.47, 0.9, 0.2},
    {0.44, 0.3, 0.1},
    {0.46, 0.7, 0.9},
    {0.45, 0.0, 0.4},
    {0.44, 1.0, 0.6},
}};

struct Range {
  double lo;
  double hi;
};

struct ClassKinematics {
  Range freq;
  Range amplitude;
};

inline constexpr ClassKinematics kinematics(GestureClass g) noexcept {
  switch (g) {
    case GestureClass::PushPull: return {{0.8, 1.6}, {0.10, 0.20}};
    case GestureClass::SlowWave: return {{0.5, 1.0}, {0.15, 0.30}};
    case GestureClass::FastWave: return {{2.0, 3.5}, {0.15, 0.30}};
    case GestureClass::UpDown: return {{0.8, 1.6}, {0.15, 0.30}};
    case GestureClass::NoActivity: return {{0.0, 0.0}, {0.0, 0.0}};
  }
  return {{0.0, 0.0}, {0.0, 0.0}};
}

inline constexpr double kRestJitter = 0.01;  // m, per-sample spread around the profile r0

inline GestureParams draw_params(GestureClass cls, const UserProfile& profile, Rng& rng,
                                 double duration, double snr_db) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto biased = [&](Range r, double bias) {
    return r.lo + (r.hi - r.lo) * (0.2 * bias + 0.8 * unit(rng));
  };
  const auto kin = kinematics(cls);
  GestureParams p;
  p.r0 = profile.r0 + kRestJitter * (2.0 * unit(rng) - 1.0);
  p.freq = biased(kin.freq, profile.speed_bias);
  p.amplitude = biased(kin.amplitude, profile.size_bias);
  p.duration = duration;
  p.snr_db = snr_db;
  p.lateral = is_transverse(cls);
  return p;
}

enum class Split { Train, Test };

inline std::string_view to_string(Split s) noexcept { return s == Split::Train ? "train" : "test"; }

struct DatasetConfig {
  std::size_t per_class = 360;
  std::size_t train_per_class = 300;
  std::uint64_t seed = 7;
  double duration = 2.0;
  std::vector<double> snr_sweep{10.0, 15.0, 20.0, 25.0};
  std::optional<int> holdout_profile;  // test split = this profile only
  RadarConfig radar{};
  EncoderConfig encoder{};
};

struct SampleRecord {
  std::string id;
  GestureClass cls = GestureClass::NoActivity;
  std::uint64_t seed = 0;
  int profile = 0;
  GestureParams params;
  std::string file;  // relative to the manifest directory
  Split split = Split::Train;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory holding manifest.jsonl
  std::vector<SampleRecord> records;

  std::vector<const SampleRecord*> split(Split s) const {
    std::vector<const SampleRecord*> out;
    for (const auto& r : records)
      if (r.split == s) out.push_back(&r);
    return out;
  }
};

inline constexpr const char* kManifestName = "manifest.jsonl";

inline std::string sample_id(GestureClass cls, std::size_t index) {
  std::ostringstream os;
  os << token(cls) << '-' << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

inline SampleRecord make_record(GestureClass cls, std::size_t index, const DatasetConfig& cfg) {
  SampleRecord rec;
  rec.cls = cls;
  rec.id = sample_id(cls, index);
  rec.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(cls), index});
  rec.profile = static_cast<int>(index % kUserProfiles.size());
  const double snr =
      cfg.snr_sweep[(index / kUserProfiles.size()) % cfg.snr_sweep.size()];
  Rng rng(derive_seed(rec.seed, {2}));
  rec.params = draw_params(cls, kUserProfiles[static_cast<std::size_t>(rec.profile)], rng,
                           cfg.duration, snr);
  rec.file = "events/" + rec.id + ".nrad";
  if (cfg.holdout_profile)
    rec.split = rec.profile == *cfg.holdout_profile ? Split::Test : Split::Train;
  else
    rec.split = index < cfg.train_per_class ? Split::Train : Split::Test;
  return rec;
}

/// Regenerates the IF signal of a record; identical on every call.
inline SampledSignal synthesize_record(const SampleRecord& rec, const RadarConfig& radar = {}) {
  const auto traj = gesture_trajectory(rec.cls, rec.params, derive_seed(rec.seed, {0}));
  return synthesize_if(traj, radar, rec.params.snr_db, derive_seed(rec.seed, {1}));
}

inline nlohmann::json to_json(const SampleRecord& r) {
  return {
      {"id", r.id},
      {"class", code(r.cls)},
      {"seed", r.seed},
      {"profile", r.profile},
      {"params",
       {{"r0", r.params.r0},
        {"amplitude", r.params.amplitude},
        {"freq", r.params.freq},
        {"duration", r.params.duration},
        {"snr_db", r.params.snr_db},
        {"lateral", r.params.lateral}}},
      {"file", r.file},
      {"split", std::string(to_string(r.split))},
  };
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  auto cls = gesture_from_code(j.at("class").get<long>());
  if (!cls) throw ValidationError("manifest record " + r.id + " has an invalid class");
  r.cls = *cls;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.profile = j.at("profile").get<int>();
  const auto& p = j.at("params");
  r.params.r0 = p.at("r0").get<double>();
  r.params.amplitude = p.at("amplitude").get<double>();
  r.params.freq = p.at("freq").get<double>();
  r.params.duration = p.at("duration").get<double>();
  r.params.snr_db = p.at("snr_db").get<double>();
  r.params.lateral = p.at("lateral").get<bool>();
  r.file = j.at("file").get<std::string>();
  const auto split = j.at("split").get<std::string>();
  if (split != "train" && split != "test")
    throw ValidationError("manifest record " + r.id + " has split '" + split + "'");
  r.split = split == "train" ? Split::Train : Split::Test;
  return r;
}

inline void write_manifest(const DatasetManifest& m) {
  const auto path = m.root / kManifestName;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  for (const auto& r : m.records) out << to_json(r).dump() << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

/// Accepts either the manifest file or the directory containing it.
inline DatasetManifest load_manifest(const std::filesystem::path& where) {
  auto path = where;
  if (std::filesystem::is_directory(path)) path /= kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  DatasetManifest m;
  m.root = path.parent_path();
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      m.records.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(m.records.back().id).second)
      throw ValidationError("duplicate manifest id " + m.records.back().id);
  }
  return m;
}

inline DatasetManifest gen_dataset(const std::filesystem::path& out_dir, const DatasetConfig& cfg) {
  if (cfg.train_per_class > cfg.per_class)
    throw ConfigError("train_per_class exceeds per_class");
  if (cfg.holdout_profile &&
      (*cfg.holdout_profile < 0 || *cfg.holdout_profile >= static_cast<int>(kUserProfiles.size())))
    throw ConfigError("holdout profile must be in [0, 6]");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "events", ec);
  if (ec) throw IoError((out_dir / "events").string(), "cannot create directory");

  DatasetManifest m;
  m.root = out_dir;
  for (auto cls : kAllGestures) {
    for (std::size_t i = 0; i < cfg.per_class; ++i) {
      auto rec = make_record(cls, i, cfg);
      const auto signal = synthesize_record(rec, cfg.radar);
      save_event_stream((out_dir / rec.file).string(), encode(signal, cfg.encoder));
      m.records.push_back(std::move(rec));
    }
  }
  std::sort(m.records.begin(), m.records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.id < b.id; });
  write_manifest(m);
  return m;
}

struct LoadedSample {
  const SampleRecord* record = nullptr;
  EventStream stream;
};

/// Loads the event files of one split; a missing file raises an IoError that
/// lists every missing id.
inline std::vector<LoadedSample> load_split(const DatasetManifest& m, Split split) {
  std::vector<LoadedSample> out;
  std::vector<std::string> missing;
  for (const auto* rec : m.split(split)) {
    const auto path = m.root / rec->file;
    if (!std::filesystem::exists(path)) {
      missing.push_back(rec->id);
      continue;
    }
    out.push_back({rec, load_event_stream(path.string())});
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ",") + id;
    throw IoError((m.root / "events").string(), "missing event files for ids " + list);
  }
  return out;
}

}  // namespace neurorad
