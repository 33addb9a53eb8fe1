#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "blw/denoise.hpp"
#include "blw/error.hpp"
#include "blw/generators.hpp"
#include "blw/ingest.hpp"
#include "blw/metrics.hpp"
#include "blw/qrs.hpp"
#include "blw/signal.hpp"

namespace blw {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Experiment description

/// Clean ECG source: "synthetic", "record" (WFDB header) or "csv".
struct SignalSource {
  std::string type = "synthetic";
  EcgSynthSpec synth{};
  std::string path;
  std::size_t channel = 0;
  double fs = 0.0;  // csv only
  double duration = 300.0;

  friend bool operator==(const SignalSource&, const SignalSource&) = default;
};

/// Baseline noise source: "sine", "composite_sine", "record" or "csv".
struct NoiseSource {
  std::string type = "sine";
  double freq = 0.6;
  std::vector<SineComponent> components;
  std::string path;
  std::size_t channel = 0;
  double fs = 0.0;  // csv only
  double offset = 0.0;  // seconds skipped at the start of a noise record

  friend bool operator==(const NoiseSource&, const NoiseSource&) = default;
};

struct MethodEntry {
  Method method = Method::Fir;
  MethodConfig config;

  friend bool operator==(const MethodEntry&, const MethodEntry&) = default;
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::uint64_t seed = 42;
  std::vector<SignalSource> signals;
  NoiseSource noise;
  double target_mad = 0.5;
  std::vector<MethodEntry> methods;
  std::vector<std::string> metrics{"mad", "ssd", "prd"};
  double window_s = 1.0;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

inline constexpr std::array<std::string_view, 3> kMetricNames{"mad", "ssd", "prd"};

inline double metric_value(const MetricTriple& t, std::string_view metric) {
  if (metric == "mad") return t.mad;
  if (metric == "ssd") return t.ssd;
  if (metric == "prd") return t.prd;
  throw ParameterError("unknown metric '" + std::string(metric) + "'");
}

namespace detail {

template <typename T>
T json_get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unknown field '" + key + "' in " + where);
}

inline MethodConfig config_from_json(const json& j, MethodConfig base) {
  if (!j.is_object()) throw ParseError("method config must be an object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer()) text = std::to_string(value.get<long long>());
    else if (value.is_number()) text = format_sample(value.get<double>());
    else throw ParseError("method parameter '" + key + "' must be a scalar");
    set_config_value(base, key, text);
  }
  return base;
}

/// Only the fields that differ from `base`, typed for JSON.
inline json config_delta_json(const MethodConfig& cfg, const MethodConfig& base) {
  json out = json::object();
  const auto now = config_to_map(cfg);
  const auto ref = config_to_map(base);
  for (const auto& key : config_keys()) {
    if (now.at(key) == ref.at(key)) continue;
    const std::string& v = now.at(key);
    if (key == "wavelet_name") out[key] = v;
    else if (v == "true" || v == "false") out[key] = (v == "true");
    else out[key] = std::stod(v);
  }
  return out;
}

inline MethodConfig seeded_defaults(std::uint64_t seed) {
  MethodConfig c;
  c.ica_seed = seed;
  return c;
}

}  // namespace detail

inline SignalSource signal_source_from_json(const json& j, std::uint64_t seed) {
  detail::reject_unknown(j, {"type", "hr", "fs", "duration", "rr_jitter", "seed", "path", "channel"}, "signal");
  SignalSource s;
  s.type = detail::json_get<std::string>(j, "type", "synthetic");
  s.duration = detail::json_get<double>(j, "duration", 300.0);
  if (s.type == "synthetic") {
    s.synth.hr = detail::json_get<double>(j, "hr", s.synth.hr);
    s.synth.fs = detail::json_get<double>(j, "fs", s.synth.fs);
    s.synth.rr_jitter = detail::json_get<double>(j, "rr_jitter", 0.0);
    s.synth.seed = detail::json_get<std::uint64_t>(j, "seed", seed);
    s.synth.duration = s.duration;
  } else if (s.type == "record" || s.type == "csv") {
    s.path = detail::json_get<std::string>(j, "path", "");
    if (s.path.empty()) throw ParseError("signal of type '" + s.type + "' needs a path");
    s.channel = detail::json_get<std::size_t>(j, "channel", 0);
    s.fs = detail::json_get<double>(j, "fs", 0.0);
    if (s.type == "csv" && !(s.fs > 0.0)) throw ParseError("csv signal needs fs");
  } else {
    throw ParseError("unknown signal type '" + s.type + "'");
  }
  return s;
}

inline json signal_source_to_json(const SignalSource& s) {
  json j;
  j["type"] = s.type;
  if (s.type == "synthetic") {
    j["hr"] = s.synth.hr;
    j["fs"] = s.synth.fs;
    j["rr_jitter"] = s.synth.rr_jitter;
    j["seed"] = s.synth.seed;
  } else {
    j["path"] = s.path;
    j["channel"] = s.channel;
    if (s.type == "csv") j["fs"] = s.fs;
  }
  j["duration"] = s.duration;
  return j;
}

inline NoiseSource noise_source_from_json(const json& j) {
  detail::reject_unknown(j, {"type", "freq", "components", "path", "channel", "fs", "offset"}, "noise");
  NoiseSource n;
  n.type = detail::json_get<std::string>(j, "type", "sine");
  if (n.type == "sine") {
    n.freq = detail::json_get<double>(j, "freq", 0.6);
  } else if (n.type == "composite_sine") {
    if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty())
      throw ParseError("composite_sine noise needs a non-empty components array");
    for (const auto& c : j.at("components"))
      n.components.push_back({detail::json_get<double>(c, "freq", 0.0), detail::json_get<double>(c, "amplitude", 1.0),
                              detail::json_get<double>(c, "phase", 0.0)});
  } else if (n.type == "record" || n.type == "csv") {
    n.path = detail::json_get<std::string>(j, "path", "");
    if (n.path.empty()) throw ParseError("noise of type '" + n.type + "' needs a path");
    n.channel = detail::json_get<std::size_t>(j, "channel", 0);
    n.fs = detail::json_get<double>(j, "fs", 0.0);
    n.offset = detail::json_get<double>(j, "offset", 0.0);
    if (n.type == "csv" && !(n.fs > 0.0)) throw ParseError("csv noise needs fs");
  } else {
    throw ParseError("unknown noise type '" + n.type + "'");
  }
  return n;
}

inline json noise_source_to_json(const NoiseSource& n) {
  json j;
  j["type"] = n.type;
  if (n.type == "sine") {
    j["freq"] = n.freq;
  } else if (n.type == "composite_sine") {
    j["components"] = json::array();
    for (const auto& c : n.components)
      j["components"].push_back({{"freq", c.freq}, {"amplitude", c.amplitude}, {"phase", c.phase}});
  } else {
    j["path"] = n.path;
    j["channel"] = n.channel;
    if (n.type == "csv") j["fs"] = n.fs;
    j["offset"] = n.offset;
  }
  return j;
}

namespace detail {

inline ExperimentSpec experiment_spec_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("experiment spec must be a JSON object");
  detail::reject_unknown(j, {"name", "seed", "signal", "signals", "noise", "contamination", "methods", "config", "metrics",
                             "window_s"},
                         "experiment spec");
  ExperimentSpec spec;
  spec.name = detail::json_get<std::string>(j, "name", spec.name);
  spec.seed = detail::json_get<std::uint64_t>(j, "seed", spec.seed);
  if (j.contains("signal")) spec.signals.push_back(signal_source_from_json(j.at("signal"), spec.seed));
  if (j.contains("signals"))
    for (const auto& s : j.at("signals")) spec.signals.push_back(signal_source_from_json(s, spec.seed));
  if (spec.signals.empty()) throw ParseError("experiment spec needs a signal");
  if (!j.contains("noise")) throw ParseError("experiment spec needs a noise source");
  spec.noise = noise_source_from_json(j.at("noise"));
  if (j.contains("contamination")) {
    detail::reject_unknown(j.at("contamination"), {"target_mad"}, "contamination");
    spec.target_mad = detail::json_get<double>(j.at("contamination"), "target_mad", spec.target_mad);
  }
  if (!(spec.target_mad > 0.0)) throw ParseError("target_mad must be positive");

  MethodConfig common = detail::seeded_defaults(spec.seed);
  if (j.contains("config")) common = detail::config_from_json(j.at("config"), common);
  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
    throw ParseError("experiment spec needs at least one method");
  for (const auto& m : j.at("methods")) {
    MethodEntry entry{Method::Fir, common};
    const std::string name = m.is_string() ? m.get<std::string>() : detail::json_get<std::string>(m, "name", "");
    const auto id = method_from_name(name, true);
    if (!id) throw ParseError("unknown method '" + name + "'; valid methods: " + method_names_list());
    entry.method = *id;
    if (m.is_object()) {
      detail::reject_unknown(m, {"name", "config"}, "method entry");
      if (m.contains("config")) entry.config = detail::config_from_json(m.at("config"), common);
    }
    spec.methods.push_back(std::move(entry));
  }
  if (j.contains("metrics")) {
    spec.metrics.clear();
    for (const auto& m : j.at("metrics")) {
      const auto name = m.get<std::string>();
      if (std::find(kMetricNames.begin(), kMetricNames.end(), name) == kMetricNames.end())
        throw ParseError("unknown metric '" + name + "'");
      spec.metrics.push_back(name);
    }
    if (spec.metrics.empty()) throw ParseError("metrics list is empty");
  }
  spec.window_s = detail::json_get<double>(j, "window_s", spec.window_s);
  if (!(spec.window_s > 0.0)) throw ParseError("window_s must be positive");
  return spec;
}

}  // namespace detail

/// Parses an experiment document. "signal" (one source) or "signals" (list);
/// "methods" entries are names or {"name": ..., "config": {...}} objects;
/// a top-level "config" object applies to every method.
inline ExperimentSpec parse_experiment_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("experiment spec is not valid JSON: ") + e.what());
  }
  try {
    return detail::experiment_spec_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment spec has a malformed field: ") + e.what());
  }
}

inline json experiment_spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["seed"] = spec.seed;
  j["signals"] = json::array();
  for (const auto& s : spec.signals) j["signals"].push_back(signal_source_to_json(s));
  j["noise"] = noise_source_to_json(spec.noise);
  j["contamination"] = {{"target_mad", spec.target_mad}};
  j["methods"] = json::array();
  const MethodConfig base = detail::seeded_defaults(spec.seed);
  for (const auto& m : spec.methods)
    j["methods"].push_back({{"name", method_info(m.method).key}, {"config", detail::config_delta_json(m.config, base)}});
  j["metrics"] = spec.metrics;
  j["window_s"] = spec.window_s;
  return j;
}

// ---------------------------------------------------------------------------
// Results

struct RecordSummary {
  std::string label;
  double fs = 0.0;
  std::size_t samples = 0;
  double scale = 0.0;  // contamination scale factor
  std::size_t beats = 0;
  std::string detect_error;

  friend bool operator==(const RecordSummary&, const RecordSummary&) = default;
};

/// Clean and processed traces over a method's worst-distortion window.
struct SegmentTrace {
  std::size_t record = 0;
  SegmentRef segment;
  std::vector<double> clean;
  std::vector<double> processed;

  friend bool operator==(const SegmentTrace&, const SegmentTrace&) = default;
};

struct MethodOutcome {
  std::string method;
  std::string label;
  std::optional<MetricTriple> metrics;  // mean over records
  std::vector<MetricTriple> per_record;
  std::vector<std::size_t> ranks;  // one per ranked metric
  std::optional<SegmentTrace> worst;
  bool improving = false;
  std::string error;  // "stage: message" when the method failed

  bool failed() const { return !error.empty(); }
  friend bool operator==(const MethodOutcome&, const MethodOutcome&) = default;
};

struct Provenance {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct BenchResult {
  std::string name;
  double fs = 0.0;
  double target_mad = 0.0;
  std::vector<std::string> metrics;
  std::vector<RecordSummary> records;
  MetricTriple identity;  // noisy vs clean, mean over records
  std::vector<MethodOutcome> methods;
  Provenance provenance;

  const MethodOutcome* find(std::string_view method) const {
    for (const auto& m : methods)
      if (m.method == method) return &m;
    return nullptr;
  }
  friend bool operator==(const BenchResult&, const BenchResult&) = default;
};

/// Rank 1 = smallest value. Missing values (failed methods) rank last; ties
/// break on the smaller value, then on the name.
inline std::vector<std::size_t> rank_values(const std::vector<std::string>& names,
                                            const std::vector<std::optional<double>>& values) {
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ha = values[a].has_value(), hb = values[b].has_value();
    if (ha != hb) return ha;
    if (ha && *values[a] != *values[b]) return *values[a] < *values[b];
    return names[a] < names[b];
  });
  std::vector<std::size_t> ranks(names.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
  return ranks;
}

/// Fills MethodOutcome::ranks for every metric in `metrics`.
inline void rank_methods(std::vector<MethodOutcome>& outcomes, const std::vector<std::string>& metrics) {
  std::vector<std::string> names;
  for (const auto& o : outcomes) names.push_back(o.method);
  for (auto& o : outcomes) o.ranks.assign(metrics.size(), 0);
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    std::vector<std::optional<double>> values;
    for (const auto& o : outcomes)
      values.push_back(o.metrics ? std::optional<double>(metric_value(*o.metrics, metrics[k])) : std::nullopt);
    const auto r = rank_values(names, values);
    for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i].ranks[k] = r[i];
  }
}

/// Window of window_s seconds centred on the first argmax of |processed - clean|.
inline SegmentRef worst_distortion_segment(const Signal& clean, const Signal& processed, double window_s = 1.0) {
  detail::require_compatible(clean, processed);
  std::size_t center = 0;
  double best = -1.0;
  for (std::size_t m = 0; m < clean.size(); ++m) {
    const double d = std::abs(processed[m] - clean[m]);
    if (d > best) {
      best = d;
      center = m;
    }
  }
  return extract_window(clean, center, window_s);
}

/// a dominates b: no metric worse and at least one strictly better.
inline bool dominates(const MetricTriple& a, const MetricTriple& b) {
  const bool no_worse = a.mad <= b.mad && a.ssd <= b.ssd && a.prd <= b.prd;
  const bool better = a.mad < b.mad || a.ssd < b.ssd || a.prd < b.prd;
  return no_worse && better;
}

// ---------------------------------------------------------------------------
// Running

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Resolves a data path: absolute paths as-is, otherwise under
/// BLWBENCH_DATA_DIR when the file exists there, else under base_dir.
inline std::filesystem::path resolve_data_path(const std::string& path, const std::filesystem::path& base_dir) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("BLWBENCH_DATA_DIR"); root && *root) {
    const auto candidate = std::filesystem::path(root) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return base_dir / p;
}

inline Signal load_clean(const SignalSource& src, const std::filesystem::path& base_dir) {
  if (src.duration < 10.0) throw ParameterError("signal duration must be at least 10 s");
  if (src.type == "synthetic") {
    EcgSynthSpec s = src.synth;
    s.duration = src.duration;
    return synth_ecg(s);
  }
  const auto path = resolve_data_path(src.path, base_dir);
  const Signal full = src.type == "record" ? read_wfdb(path, src.channel) : read_csv(path, src.fs);
  return take_prefix(full, src.duration);
}

/// Noise at the clean signal's rate, at least as long as the clean signal.
inline Signal load_noise(const NoiseSource& src, const Signal& clean, const std::filesystem::path& base_dir) {
  const double fs = clean.fs();
  const double duration = static_cast<double>(clean.size()) / fs;
  if (src.type == "sine") return synth_sine_blw(src.freq, fs, duration, 1.0);
  if (src.type == "composite_sine") return synth_composite_blw(src.components, fs, duration);
  const auto path = resolve_data_path(src.path, base_dir);
  Signal raw = src.type == "record" ? read_wfdb(path, src.channel) : read_csv(path, src.fs);
  if (src.offset > 0.0) {
    const auto skip = detail::rounded_count(src.offset, raw.fs());
    if (skip >= raw.size()) throw LengthError("noise offset beyond the end of the noise record");
    raw = raw.with_samples({raw.samples().begin() + static_cast<std::ptrdiff_t>(skip), raw.samples().end()});
  }
  if (raw.fs() != fs) raw = resample(raw, fs);
  return raw;
}

struct PreparedRecord {
  Signal clean;
  Signal noisy;
  double scale = 1.0;
  std::optional<BeatAnnotations> annotations;
  std::string detect_error;
};

inline PreparedRecord prepare_record(const ExperimentSpec& spec, const SignalSource& src,
                                     const std::filesystem::path& base_dir) {
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(std::string(name) + ": " + e.what());
    }
  };
  Signal clean = stage("load", [&] { return load_clean(src, base_dir); });
  Signal noise = stage("noise", [&] { return load_noise(spec.noise, clean, base_dir); });
  ContaminationSpec cs;
  cs.target_mad = spec.target_mad;
  cs.noise_kind = spec.noise.type == "sine" ? NoiseKind::ArtificialSine : NoiseKind::RealRecord;
  cs.sine_freq = spec.noise.freq;
  auto cont = stage("contaminate", [&] { return contaminate(clean, noise, cs); });
  PreparedRecord rec{std::move(clean), std::move(cont.noisy), cont.scale, std::nullopt, {}};
  try {
    rec.annotations = detect_r_peaks(rec.noisy);
  } catch (const Error& e) {
    rec.detect_error = e.what();
  }
  return rec;
}

struct CellResult {
  std::optional<MetricTriple> metrics;
  std::optional<SegmentTrace> worst;
  std::string error;
};

inline CellResult run_cell(const MethodEntry& entry, const PreparedRecord& rec, std::size_t record_index,
                           double window_s) {
  CellResult cell;
  const auto& info = method_info(entry.method);
  if (info.needs_annotations && !rec.annotations) {
    cell.error = "detect: " + rec.detect_error;
    return cell;
  }
  std::optional<Signal> out;
  try {
    out = denoise(entry.method, rec.noisy, entry.config, rec.annotations ? &*rec.annotations : nullptr);
  } catch (const std::exception& e) {
    cell.error = std::string("denoise: ") + e.what();
    return cell;
  }
  try {
    cell.metrics = evaluate(rec.clean, *out);
    const auto seg = worst_distortion_segment(rec.clean, *out, window_s);
    SegmentTrace tr{record_index, seg, {}, {}};
    for (std::size_t m = seg.start_index; m < seg.start_index + seg.length; ++m) {
      tr.clean.push_back(rec.clean[m]);
      tr.processed.push_back((*out)[m]);
    }
    cell.worst = std::move(tr);
  } catch (const std::exception& e) {
    cell.metrics.reset();
    cell.error = std::string("metrics: ") + e.what();
  }
  return cell;
}

/// Runs `count` tasks on up to `jobs` threads; task(i) must write only slot i.
template <typename Task>
void parallel_for(std::size_t count, std::size_t jobs, Task&& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

/// Full pipeline: clean -> noise (resampled to the clean rate) -> contamination
/// at the target MAD -> one R-peak detection on the noisy signal -> every
/// method -> metrics vs clean -> ranks and worst segments. With several
/// records, each metric is averaged across records before ranking.
inline BenchResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& base_dir = ".",
                                  std::size_t jobs = 1) {
  if (spec.methods.empty()) throw ParameterError("experiment needs at least one method");
  if (spec.signals.empty()) throw ParameterError("experiment needs at least one signal");
  BenchResult res;
  res.name = spec.name;
  res.target_mad = spec.target_mad;
  res.metrics = spec.metrics;
  res.provenance.seed = spec.seed;
  res.provenance.spec_hash = fnv1a_hex(experiment_spec_to_json(spec).dump());
  res.provenance.started = utc_timestamp();

  std::vector<PreparedRecord> records;
  for (const auto& src : spec.signals) records.push_back(prepare_record(spec, src, base_dir));
  res.fs = records.front().clean.fs();
  for (const auto& r : records)
    if (r.clean.fs() != res.fs) throw RateError("all experiment records must share one sampling rate");

  std::vector<MetricTriple> identity;
  for (const auto& r : records) {
    res.records.push_back({r.clean.label(), r.clean.fs(), r.clean.size(), r.scale,
                           r.annotations ? r.annotations->size() : 0, r.detect_error});
    identity.push_back(evaluate(r.clean, r.noisy));
  }
  auto mean_triple = [](const std::vector<MetricTriple>& v) {
    MetricTriple t;
    for (const auto& x : v) {
      t.mad += x.mad;
      t.ssd += x.ssd;
      t.prd += x.prd;
    }
    const double n = static_cast<double>(v.size());
    return MetricTriple{t.mad / n, t.ssd / n, t.prd / n};
  };
  res.identity = mean_triple(identity);

  const std::size_t n_rec = records.size();
  std::vector<CellResult> cells(spec.methods.size() * n_rec);
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const std::size_t m = i / n_rec, r = i % n_rec;
    cells[i] = run_cell(spec.methods[m], records[r], r, spec.window_s);
  });

  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    const auto& info = method_info(spec.methods[m].method);
    MethodOutcome o{std::string(info.key), std::string(info.label), std::nullopt, {}, {}, std::nullopt, false, {}};
    double worst_mad = -1.0;
    for (std::size_t r = 0; r < n_rec; ++r) {
      auto& cell = cells[m * n_rec + r];
      if (!cell.error.empty()) {
        if (o.error.empty()) o.error = cell.error;
        continue;
      }
      o.per_record.push_back(*cell.metrics);
      if (cell.metrics->mad > worst_mad) {
        worst_mad = cell.metrics->mad;
        o.worst = std::move(cell.worst);
      }
    }
    if (o.error.empty()) {
      o.metrics = mean_triple(o.per_record);
      o.improving = dominates(*o.metrics, res.identity);
    } else {
      o.per_record.clear();
      o.worst.reset();
    }
    res.methods.push_back(std::move(o));
  }
  rank_methods(res.methods, res.metrics);
  res.provenance.finished = utc_timestamp();
  return res;
}

// ---------------------------------------------------------------------------
// Serialization and reports

inline json triple_to_json(const MetricTriple& t) { return {{"mad", t.mad}, {"ssd", t.ssd}, {"prd", t.prd}}; }

inline MetricTriple triple_from_json(const json& j) {
  return {j.at("mad").get<double>(), j.at("ssd").get<double>(), j.at("prd").get<double>()};
}

inline json result_to_json(const BenchResult& r, bool with_provenance_times = true) {
  json j;
  j["name"] = r.name;
  j["fs"] = r.fs;
  j["target_mad"] = r.target_mad;
  j["metrics"] = r.metrics;
  j["records"] = json::array();
  for (const auto& rec : r.records)
    j["records"].push_back({{"label", rec.label},
                            {"fs", rec.fs},
                            {"samples", rec.samples},
                            {"scale", rec.scale},
                            {"beats", rec.beats},
                            {"detect_error", rec.detect_error}});
  j["identity"] = triple_to_json(r.identity);
  j["methods"] = json::array();
  for (const auto& m : r.methods) {
    json o;
    o["method"] = m.method;
    o["label"] = m.label;
    o["metrics"] = m.metrics ? triple_to_json(*m.metrics) : json(nullptr);
    o["per_record"] = json::array();
    for (const auto& t : m.per_record) o["per_record"].push_back(triple_to_json(t));
    o["ranks"] = json::object();
    for (std::size_t k = 0; k < r.metrics.size() && k < m.ranks.size(); ++k) o["ranks"][r.metrics[k]] = m.ranks[k];
    o["improving"] = m.improving;
    o["error"] = m.error;
    if (m.worst) {
      o["worst_segment"] = {{"record", m.worst->record},
                            {"start_index", m.worst->segment.start_index},
                            {"length", m.worst->segment.length},
                            {"center_index", m.worst->segment.center_index},
                            {"clean", m.worst->clean},
                            {"processed", m.worst->processed}};
    } else {
      o["worst_segment"] = nullptr;
    }
    j["methods"].push_back(std::move(o));
  }
  json prov{{"spec_hash", r.provenance.spec_hash}, {"seed", r.provenance.seed}};
  if (with_provenance_times) {
    prov["started"] = r.provenance.started;
    prov["finished"] = r.provenance.finished;
  }
  j["provenance"] = std::move(prov);
  return j;
}

inline BenchResult result_from_json(const json& j) {
  try {
    BenchResult r;
    r.name = j.at("name").get<std::string>();
    r.fs = j.at("fs").get<double>();
    r.target_mad = j.at("target_mad").get<double>();
    r.metrics = j.at("metrics").get<std::vector<std::string>>();
    for (const auto& rec : j.at("records"))
      r.records.push_back({rec.at("label").get<std::string>(), rec.at("fs").get<double>(),
                           rec.at("samples").get<std::size_t>(), rec.at("scale").get<double>(),
                           rec.at("beats").get<std::size_t>(), rec.at("detect_error").get<std::string>()});
    r.identity = triple_from_json(j.at("identity"));
    for (const auto& o : j.at("methods")) {
      MethodOutcome m;
      m.method = o.at("method").get<std::string>();
      m.label = o.at("label").get<std::string>();
      if (!o.at("metrics").is_null()) m.metrics = triple_from_json(o.at("metrics"));
      for (const auto& t : o.at("per_record")) m.per_record.push_back(triple_from_json(t));
      for (const auto& name : r.metrics) m.ranks.push_back(o.at("ranks").at(name).get<std::size_t>());
      m.improving = o.at("improving").get<bool>();
      m.error = o.at("error").get<std::string>();
      if (const auto& w = o.at("worst_segment"); !w.is_null()) {
        SegmentTrace tr;
        tr.record = w.at("record").get<std::size_t>();
        tr.segment = {w.at("start_index").get<std::size_t>(), w.at("length").get<std::size_t>(),
                      w.at("center_index").get<std::size_t>()};
        tr.clean = w.at("clean").get<std::vector<double>>();
        tr.processed = w.at("processed").get<std::vector<double>>();
        m.worst = std::move(tr);
      }
      r.methods.push_back(std::move(m));
    }
    const auto& p = j.at("provenance");
    r.provenance.spec_hash = p.at("spec_hash").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.started = detail::json_get<std::string>(p, "started", "");
    r.provenance.finished = detail::json_get<std::string>(p, "finished", "");
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed bench result: ") + e.what());
  }
}

/// Hash of the JSON report with the timestamps left out.
inline std::string determinism_hash(const BenchResult& r) { return fnv1a_hex(result_to_json(r, false).dump()); }

inline std::string format_fixed(double v, int decimals = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

inline std::string render_csv(const BenchResult& r) {
  std::string out = "method,label";
  for (const auto& m : kMetricNames) out += "," + std::string(m);
  for (const auto& m : r.metrics) out += ",rank_" + m;
  out += ",improving,error\n";
  for (const auto& o : r.methods) {
    out += o.method + "," + o.label;
    for (const auto& m : kMetricNames) out += "," + (o.metrics ? format_sample(metric_value(*o.metrics, m)) : "");
    for (std::size_t rank : o.ranks) out += "," + std::to_string(rank);
    std::string err = o.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out += std::string(",") + (o.improving ? "true" : "false") + ",\"" + err + "\"\n";
  }
  return out;
}

inline std::string render_markdown(const BenchResult& r) {
  std::string out = "## " + r.name + "\n\n| Method |";
  for (const auto& m : r.metrics) {
    std::string up = m;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out += " " + up + " |";
  }
  for (const auto& m : r.metrics) {
    std::string up = m;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out += " " + up + " rank |";
  }
  out += " Improves |\n|---|";
  for (std::size_t k = 0; k < 2 * r.metrics.size() + 1; ++k) out += "---|";
  out += "\n";
  for (const auto& o : r.methods) {
    out += "| " + o.label + " |";
    for (const auto& m : r.metrics) out += " " + (o.metrics ? format_fixed(metric_value(*o.metrics, m)) : "error") + " |";
    for (std::size_t rank : o.ranks) out += " " + std::to_string(rank) + "° |";
    out += std::string(" ") + (o.failed() ? "error" : (o.improving ? "yes" : "no")) + " |\n";
  }
  out += "\nNoisy input: MAD " + format_fixed(r.identity.mad) + ", SSD " + format_fixed(r.identity.ssd) + ", PRD " +
         format_fixed(r.identity.prd) + ".\n";
  for (const auto& o : r.methods)
    if (o.failed()) out += "\n" + o.label + " failed (" + o.error + ").\n";
  return out;
}

/// time_s, clean, processed, difference over the worst-distortion window.
inline std::string render_plot_csv(const MethodOutcome& o, double fs) {
  std::string out = "time_s,clean,processed,difference\n";
  if (!o.worst) return out;
  const auto& w = *o.worst;
  for (std::size_t i = 0; i < w.clean.size(); ++i) {
    const double t = static_cast<double>(w.segment.start_index + i) / fs;
    out += format_sample(t) + "," + format_sample(w.clean[i]) + "," + format_sample(w.processed[i]) + "," +
           format_sample(w.processed[i] - w.clean[i]) + "\n";
  }
  return out;
}

enum class ReportFormat { Json, Csv, Markdown };

inline std::optional<ReportFormat> report_format_from_name(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

/// Writes <name>.json / .csv / .md into out_dir (created if missing) and,
/// with plot_data, plot_<method>.csv per method. Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const BenchResult& r, const std::filesystem::path& out_dir,
                                                      const std::vector<ReportFormat>& formats, bool plot_data) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (auto f : formats) {
    std::filesystem::path p;
    switch (f) {
      case ReportFormat::Json:
        p = out_dir / (r.name + ".json");
        write_text(p, result_to_json(r).dump(2) + "\n");
        break;
      case ReportFormat::Csv:
        p = out_dir / (r.name + ".csv");
        write_text(p, render_csv(r));
        break;
      case ReportFormat::Markdown:
        p = out_dir / (r.name + ".md");
        write_text(p, render_markdown(r));
        break;
    }
    written.push_back(p);
  }
  if (plot_data) {
    for (const auto& o : r.methods) {
      if (!o.worst) continue;
      auto p = out_dir / ("plot_" + o.method + ".csv");
      write_text(p, render_plot_csv(o, r.fs));
      written.push_back(p);
    }
  }
  return written;
}

}  // namespace blw
