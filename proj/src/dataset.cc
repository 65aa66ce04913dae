// Copyright 2026 The BeamFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamfusion/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include <json.hpp>

#include "beamfusion/beamformer.h"
#include "beamfusion/speech_synth.h"
#include "beamfusion/tensor_file.h"
#include "beamfusion/wav.h"

namespace beamfusion {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json PositionJson(const Position& p) { return Json::array({p[0], p[1], p[2]}); }

Position PositionFrom(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(std::string(what) + " must be an array of three numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json TrajectoryJsonValue(const SourceTrajectory& traj) {
  if (const auto* s = std::get_if<StaticTrajectory>(&traj)) {
    return {{"type", "static"}, {"position", PositionJson(s->position)}};
  }
  const auto& c = std::get<CircularHopTrajectory>(traj);
  return {{"type", "circular_hop"}, {"center", PositionJson(c.center)},
          {"radius", c.radius},      {"start_az", c.start_az},
          {"stop_az", c.stop_az},    {"step", c.step},
          {"interval", c.interval}};
}

SourceTrajectory TrajectoryFrom(const Json& j) {
  const std::string type = j.value("type", "");
  if (type == "static") return StaticTrajectory{PositionFrom(j.at("position"), "position")};
  if (type == "circular_hop") {
    CircularHopTrajectory c;
    c.center = PositionFrom(j.at("center"), "center");
    c.radius = j.value("radius", c.radius);
    c.start_az = j.value("start_az", c.start_az);
    c.stop_az = j.value("stop_az", c.stop_az);
    c.step = j.value("step", c.step);
    c.interval = j.value("interval", c.interval);
    return c;
  }
  throw Error("unknown trajectory type '" + type + "'");
}

Json ScenarioJsonValue(const Scenario& scn) {
  Json room = {{"dims", PositionJson(scn.room.dims)},
               {"t60", scn.room.t60},
               {"sample_rate", scn.room.sample_rate},
               {"sound_speed", scn.room.sound_speed}};
  if (scn.room.max_order) room["max_order"] = *scn.room.max_order;
  Json interferers = Json::array();
  for (const auto& t : scn.interferers) interferers.push_back(TrajectoryJsonValue(t));
  Json out = {{"room", room},
              {"array_center", PositionJson(scn.array_center)},
              {"geometry",
               {{"num_mics", scn.geometry.num_mics},
                {"spacing", scn.geometry.spacing},
                {"sound_speed", scn.geometry.sound_speed},
                {"sample_rate", scn.geometry.sample_rate}}},
              {"target_az", scn.target_az},
              {"target_distance", scn.target_distance},
              {"interferers", interferers}};
  if (std::isfinite(scn.snr_db)) {
    out["snr_db"] = scn.snr_db;
  } else {
    out["snr_db"] = nullptr;
  }
  out["seed"] = scn.seed;
  return out;
}

// Loads the corpus file list once; sorted for a stable order.
std::vector<fs::path> ListCorpus(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("source directory " + dir + " contains no .wav files");
  return files;
}

// Repeats `clip` until `length` samples are filled.
std::vector<double> Tile(const std::vector<double>& clip, std::size_t length) {
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = clip[i % clip.size()];
  return out;
}

std::vector<double> LoadSource(const fs::path& path, double sample_rate) {
  WavData wav = ReadWav(path.string());
  if (wav.channels.size() != 1) throw Error(path.string() + ": expected a mono file");
  if (wav.sample_rate != static_cast<int>(sample_rate)) {
    throw Error(path.string() + ": sample rate " + std::to_string(wav.sample_rate) +
                " does not match " + std::to_string(static_cast<int>(sample_rate)));
  }
  if (wav.frames() == 0) throw Error(path.string() + ": empty file");
  return std::move(wav.channels[0]);
}

std::string SampleId(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

}  // namespace

std::string TrajectoryToJson(const SourceTrajectory& traj) {
  return TrajectoryJsonValue(traj).dump();
}

std::string ScenarioToJson(const Scenario& scn) { return ScenarioJsonValue(scn).dump(2) + "\n"; }

Scenario ParseScenarioJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("scenario JSON: ") + e.what());
  }
  try {
    Scenario scn;
    if (j.contains("room")) {
      const Json& r = j["room"];
      if (r.contains("dims")) scn.room.dims = PositionFrom(r["dims"], "room.dims");
      scn.room.t60 = r.value("t60", scn.room.t60);
      scn.room.sample_rate = r.value("sample_rate", scn.room.sample_rate);
      scn.room.sound_speed = r.value("sound_speed", scn.room.sound_speed);
      if (r.contains("max_order") && !r["max_order"].is_null()) {
        scn.room.max_order = r["max_order"].get<int>();
      }
    }
    if (j.contains("array_center")) scn.array_center = PositionFrom(j["array_center"], "array_center");
    if (j.contains("geometry")) {
      const Json& g = j["geometry"];
      scn.geometry.num_mics = g.value("num_mics", scn.geometry.num_mics);
      scn.geometry.spacing = g.value("spacing", scn.geometry.spacing);
      scn.geometry.sound_speed = g.value("sound_speed", scn.geometry.sound_speed);
      scn.geometry.sample_rate = g.value("sample_rate", scn.geometry.sample_rate);
    }
    scn.target_az = j.value("target_az", scn.target_az);
    scn.target_distance = j.value("target_distance", scn.target_distance);
    if (j.contains("interferers")) {
      for (const Json& t : j["interferers"]) scn.interferers.push_back(TrajectoryFrom(t));
    }
    if (j.contains("snr_db")) {
      scn.snr_db = j["snr_db"].is_null() ? std::numeric_limits<double>::infinity()
                                         : j["snr_db"].get<double>();
    }
    scn.seed = j.value("seed", scn.seed);
    scn.Validate();
    return scn;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("scenario JSON: ") + e.what());
  }
}

void GenerateDataset(const DatasetConfig& config, int count, std::uint64_t seed,
                     const std::string& out_dir) {
  if (count < 0) throw Error("dataset: count must be non-negative");
  if (!(config.clip_seconds > 0.0)) throw Error("dataset: clip length must be positive");
  if (config.t60_min > config.t60_max || config.snr_min > config.snr_max) {
    throw Error("dataset: empty T60 or SNR range");
  }
  config.base.Validate();
  config.stft.Validate();
  const fs::path root(out_dir);
  fs::create_directories(root);
  if (count == 0) {
    WriteFileBytes((root / "manifest.jsonl").string(), "");
    return;
  }

  const ArrayGeometry& geom = config.base.geometry;
  const double sample_rate = geom.sample_rate;
  const auto length = static_cast<std::size_t>(std::llround(config.clip_seconds * sample_rate));
  const std::vector<fs::path> corpus =
      config.source_dir.empty() ? std::vector<fs::path>{} : ListCorpus(config.source_dir);

  std::vector<double> nulls;
  for (double d : config.nulls_deg) nulls.push_back(DegToRad(d));
  const FilterBank bank = DesignDmaBank(geom, FrequencyGrid{config.stft.nfft, sample_rate},
                                        DegToRad(config.theta_s_deg), nulls, config.include_mwng);
  SaveFilterBank(bank, (root / "filters.bfb").string());

  std::vector<std::string> lines(count);
  std::vector<std::string> errors(count);
  const int fs_int = static_cast<int>(sample_rate);

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      const std::uint64_t sample_seed = DeriveSeed(seed, static_cast<std::uint64_t>(i));
      std::mt19937_64 rng(sample_seed);
      std::uniform_real_distribution<double> t60_dist(config.t60_min, config.t60_max);
      std::uniform_real_distribution<double> snr_dist(config.snr_min, config.snr_max);
      const double t60 = t60_dist(rng);
      const double snr = snr_dist(rng);

      std::vector<double> target, interf;
      if (corpus.empty()) {
        SpeechSynthOptions speech;
        speech.sample_rate = sample_rate;
        speech.seconds = config.clip_seconds;
        target = SynthesizeSpeech(DeriveSeed(sample_seed, 1), speech);
        interf = SynthesizeSpeech(DeriveSeed(sample_seed, 2), speech);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
        target = LoadSource(corpus[pick(rng)], sample_rate);
        interf = LoadSource(corpus[pick(rng)], sample_rate);
      }
      target = Tile(SilenceTrim(target, sample_rate), length);
      interf = Tile(SilenceTrim(interf, sample_rate), length);

      Scenario scn = config.base;
      scn.room.t60 = t60;
      scn.snr_db = snr;
      scn.seed = DeriveSeed(sample_seed, 3);
      CircularHopTrajectory traj = config.interferer;
      traj.center = scn.array_center;
      scn.interferers = {traj};
      const ScenarioAudio audio = SynthesizeScenario(scn, target, {interf});

      const auto beam_specs =
          ApplyBank(bank, AnalyzeMultichannel(audio.mixture, config.stft, Exec::kSerial),
                    Exec::kSerial);
      std::vector<std::vector<double>> beams;
      for (const auto& b : beam_specs) beams.push_back(SynthesizeAligned(b, length, Exec::kSerial));

      const std::string id = SampleId(i);
      const fs::path rel = fs::path("samples") / id;
      fs::create_directories(root / rel);
      Json paths = {{"mix", (rel / "mix.wav").string()},
                    {"beams", (rel / "beams.wav").string()},
                    {"ref", (rel / "ref.wav").string()}};
      WriteWav((root / rel / "mix.wav").string(), audio.mixture, fs_int);
      WriteWav((root / rel / "beams.wav").string(), beams, fs_int);
      WriteWavMono((root / rel / "ref.wav").string(), audio.reference, fs_int);
      if (config.write_components) {
        paths["target"] = (rel / "target.wav").string();
        paths["interference"] = (rel / "interference.wav").string();
        paths["noise"] = (rel / "noise.wav").string();
        WriteWav((root / rel / "target.wav").string(), audio.target, fs_int);
        WriteWav((root / rel / "interference.wav").string(), audio.interference, fs_int);
        WriteWav((root / rel / "noise.wav").string(), audio.noise, fs_int);
      }
      paths["meta"] = (rel / "meta.json").string();

      Json record = {{"id", id},
                     {"paths", paths},
                     {"t60_s", t60},
                     {"snr_db", snr},
                     {"seed", sample_seed},
                     {"trajectory", TrajectoryJsonValue(traj)}};
      Json meta = record;
      meta["beam_labels"] = Json::array();
      for (const auto& f : bank.filters) meta["beam_labels"].push_back(f.label);
      meta["stft"] = {{"nfft", config.stft.nfft},
                      {"window_len", config.stft.window_len},
                      {"hop", config.stft.hop},
                      {"window", "sqrt_hann"}};
      meta["scenario"] = ScenarioJsonValue(scn);
      WriteFileBytes((root / rel / "meta.json").string(), meta.dump(2) + "\n");
      lines[i] = record.dump();
    } catch (const std::exception& e) {
      errors[i] = "sample " + std::to_string(i) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("dataset: " + e);
  }
  std::string manifest;
  for (const auto& l : lines) manifest += l + "\n";
  WriteFileBytes((root / "manifest.jsonl").string(), manifest);
}

}  // namespace beamfusion
