#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blw/blw.hpp"

namespace blw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitInternal = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Thrown by parse_args for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

struct CommandPlan {
  std::string subcommand;
  std::uint64_t seed = 42;
  int verbosity = 0;

  // paths
  std::string in, out, ref, test, noise, ann, spec, record, config_file, events_out;

  // signal parameters
  double fs = 0.0;
  double noise_fs = 0.0;
  double hr = 120.0;
  double duration = 300.0;
  double rr_jitter = 0.0;
  double resample_fs = 0.0;
  std::size_t channel = 0;

  // baseline wander synthesis
  std::string blw_kind = "sine";
  double freq = 0.6;
  double amplitude = 1.0;
  std::vector<SineComponent> components;

  double target_mad = 0.5;

  std::optional<Method> method;
  MethodConfig config;

  // bench
  std::size_t jobs = 1;
  std::vector<ReportFormat> formats{ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown};
  bool plot_data = false;
  bool seed_given = false;
};

namespace detail {

/// "f:a[:phase],f:a[:phase],..."
inline std::vector<SineComponent> parse_components(const std::string& text) {
  std::vector<SineComponent> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    std::vector<double> v;
    std::stringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) {
      double x = 0.0;
      if (!blw::detail::parse_double(blw::detail::trim(f), x)) throw UsageError("bad component '" + item + "'");
      v.push_back(x);
    }
    if (v.size() < 2 || v.size() > 3) throw UsageError("component '" + item + "' must be freq:amplitude[:phase]");
    out.push_back({v[0], v[1], v.size() == 3 ? v[2] : 0.0});
  }
  if (out.empty()) throw UsageError("--components needs at least one freq:amplitude pair");
  return out;
}

inline void require_fs(const CommandPlan& p) {
  if (!(p.fs > 0.0)) throw UsageError(p.subcommand + ": --fs must be a positive sampling rate");
}

}  // namespace detail

/// Parses argv into a validated plan. Throws UsageError on bad input and
/// HelpRequested for --help.
inline CommandPlan parse_args(int argc, const char* const* argv) {
  CommandPlan p;
  CLI::App app{"ECG baseline-wander removal toolkit and benchmark", "blwbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "blwbench 1.0.0");
  auto* seed_opt = app.add_option("--seed", p.seed, "Seed for every random choice (default 42)");
  app.add_flag("-v,--verbose", p.verbosity, "More diagnostics on stderr (repeatable)");

  std::string method_name, components, formats = "json,csv,markdown";
  std::optional<double> cutoff;
  std::vector<std::string> sets;

  auto* synth = app.add_subcommand("synth", "Synthesize a clean ECG");
  synth->add_option("--hr", p.hr, "Heart rate in bpm")->capture_default_str();
  synth->add_option("--fs", p.fs, "Sampling rate in Hz (default 360)");
  synth->add_option("--duration", p.duration, "Duration in seconds")->capture_default_str();
  synth->add_option("--rr-jitter", p.rr_jitter, "Fractional standard deviation of RR intervals");
  synth->add_option("--out", p.out, "Output CSV")->required();
  synth->add_option("--events", p.events_out, "Also write the true R-peak indices here");

  auto* blw_cmd = app.add_subcommand("blw", "Synthesize an artificial baseline wander");
  blw_cmd->add_option("--kind", p.blw_kind, "sine or composite")->check(CLI::IsMember({"sine", "composite"}));
  blw_cmd->add_option("--freq", p.freq, "Sine frequency in Hz")->capture_default_str();
  blw_cmd->add_option("--amplitude", p.amplitude, "Sine amplitude")->capture_default_str();
  blw_cmd->add_option("--components", components, "Composite parts as freq:amp[:phase],...");
  blw_cmd->add_option("--fs", p.fs, "Sampling rate in Hz")->required();
  blw_cmd->add_option("--duration", p.duration, "Duration in seconds")->capture_default_str();
  blw_cmd->add_option("--out", p.out, "Output CSV")->required();

  auto* ingest = app.add_subcommand("ingest", "Convert a WFDB record or CSV to a single-channel CSV");
  auto* rec_opt = ingest->add_option("--record", p.record, "WFDB header (.hea)");
  auto* csv_opt = ingest->add_option("--csv", p.in, "Single-column CSV");
  rec_opt->excludes(csv_opt);
  ingest->add_option("--channel", p.channel, "Channel index (0-based)");
  ingest->add_option("--fs", p.fs, "Sampling rate of a CSV input");
  ingest->add_option("--duration", p.duration, "Keep only the first N seconds");
  ingest->add_option("--resample", p.resample_fs, "Resample to this rate");
  ingest->add_option("--out", p.out, "Output CSV")->required();

  auto* cont = app.add_subcommand("contaminate", "Add baseline wander scaled to a target MAD");
  cont->add_option("--clean", p.in, "Clean ECG CSV")->required();
  cont->add_option("--noise", p.noise, "Noise CSV")->required();
  cont->add_option("--fs", p.fs, "Clean sampling rate")->required();
  cont->add_option("--noise-fs", p.noise_fs, "Noise sampling rate (default: --fs); resampled when different");
  cont->add_option("--target-mad", p.target_mad, "Target MAD of the contamination")->capture_default_str();
  cont->add_option("--out", p.out, "Output CSV")->required();

  auto* detect = app.add_subcommand("detect", "Detect R peaks");
  detect->add_option("--in", p.in, "ECG CSV")->required();
  detect->add_option("--fs", p.fs, "Sampling rate")->required();
  detect->add_option("--out", p.out, "Annotation CSV (one sample index per line)")->required();

  auto* den = app.add_subcommand("denoise", "Remove baseline wander with one method");
  den->add_option("--method", method_name, "One of: " + method_names_list())->required();
  den->add_option("--in", p.in, "Input CSV")->required();
  den->add_option("--fs", p.fs, "Sampling rate")->required();
  den->add_option("--out", p.out, "Output CSV");
  den->add_option("--ann", p.ann, "R-peak annotations (detected when omitted)");
  den->add_option("--ref", p.ref, "Clean reference; prints MAD/SSD/PRD when given");
  den->add_option("--cutoff", cutoff, "Cut-off frequency in Hz (default 0.67)");
  den->add_option("--config", p.config_file, "Method parameter file (key = value lines)");
  den->add_option("--set", sets, "Override one parameter, key=value (repeatable)");

  auto* ev = app.add_subcommand("evaluate", "Compare a processed signal with its reference");
  ev->add_option("--ref", p.ref, "Reference CSV")->required();
  ev->add_option("--test", p.test, "Processed CSV")->required();
  ev->add_option("--fs", p.fs, "Sampling rate")->required();

  auto* bench = app.add_subcommand("bench", "Run a full experiment from a JSON spec");
  bench->add_option("--spec", p.spec, "Experiment spec (JSON)")->required();
  bench->add_option("--out", p.out, "Report directory")->capture_default_str();
  bench->add_option("--format", formats, "Comma-separated report formats: json,csv,markdown");
  bench->add_flag("--plot-data", p.plot_data, "Write worst-segment traces per method");
  bench->add_option("--jobs", p.jobs, "Parallel (method x record) cells")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::CallForVersion& e) {
    throw HelpRequested{e.what()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  p.seed_given = seed_opt->count() > 0;
  p.subcommand = app.get_subcommands().front()->get_name();

  if (p.subcommand == "synth") {
    if (!(p.fs > 0.0)) p.fs = 360.0;
  } else if (p.subcommand == "blw") {
    if (p.blw_kind == "composite") {
      if (components.empty()) throw UsageError("blw: --kind composite needs --components");
      p.components = detail::parse_components(components);
    }
    detail::require_fs(p);
  } else if (p.subcommand == "ingest") {
    if (p.record.empty() && p.in.empty()) throw UsageError("ingest: give --record or --csv");
    if (!p.in.empty()) detail::require_fs(p);
    if (ingest->get_option("--duration")->count() == 0) p.duration = 0.0;
  } else if (p.subcommand == "contaminate" || p.subcommand == "detect" || p.subcommand == "evaluate") {
    detail::require_fs(p);
    if (!(p.noise_fs > 0.0)) p.noise_fs = p.fs;
  } else if (p.subcommand == "denoise") {
    detail::require_fs(p);
    p.method = method_from_name(method_name);
    if (!p.method) throw UsageError("unknown method '" + method_name + "'; valid methods: " + method_names_list());
    p.config.ica_seed = p.seed;
    if (!p.config_file.empty()) p.config = parse_config(read_text_file(p.config_file), p.config);
    if (cutoff) p.config.cutoff_hz = *cutoff;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      try {
        set_config_value(p.config, blw::detail::trim(std::string_view(kv).substr(0, eq)),
                         std::string_view(kv).substr(eq + 1));
      } catch (const ParseError& e) {
        throw UsageError(std::string("--set: ") + e.what() + "; valid keys are listed by 'denoise --help'");
      }
    }
    if (p.out.empty() && p.ref.empty()) throw UsageError("denoise: give --out, --ref or both");
  } else if (p.subcommand == "bench") {
    if (p.out.empty()) p.out = "results";
    p.formats.clear();
    std::stringstream ss(formats);
    std::string f;
    while (std::getline(ss, f, ',')) {
      const auto fmt = report_format_from_name(blw::detail::trim(f));
      if (!fmt) throw UsageError("unknown report format '" + f + "' (json, csv, markdown)");
      p.formats.push_back(*fmt);
    }
    if (p.formats.empty() && !p.plot_data) throw UsageError("bench: nothing to write");
  }
  return p;
}

namespace detail {

inline void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path)) throw IoError(std::string(what) + " not found: " + path);
}

inline std::string metrics_line(const MetricTriple& t) {
  return "MAD=" + format_sample(t.mad) + " SSD=" + format_sample(t.ssd) + " PRD=" + format_sample(t.prd);
}

}  // namespace detail

/// Runs a plan. Summaries go to `out`, diagnostics to `err`. Library errors
/// map to exit 1, anything else to exit 2.
inline int execute(const CommandPlan& p, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (p.subcommand == "synth") {
      EcgSynthSpec s;
      s.hr = p.hr;
      s.fs = p.fs;
      s.duration = p.duration;
      s.rr_jitter = p.rr_jitter;
      s.seed = p.seed;
      const auto syn = synth_ecg_with_events(s);
      write_csv(syn.ecg, p.out);
      if (!p.events_out.empty()) write_annotations_csv({syn.r_events, s.fs}, p.events_out);
      out << "synth: " << syn.ecg.size() << " samples at " << s.fs << " Hz, " << syn.r_events.size() << " beats -> "
          << p.out << "\n";
    } else if (p.subcommand == "blw") {
      const Signal b = p.blw_kind == "sine" ? synth_sine_blw(p.freq, p.fs, p.duration, p.amplitude)
                                            : synth_composite_blw(p.components, p.fs, p.duration);
      write_csv(b, p.out);
      out << "blw: " << b.size() << " samples (" << p.blw_kind << ") -> " << p.out << "\n";
    } else if (p.subcommand == "ingest") {
      Signal s = [&] {
        if (!p.record.empty()) {
          detail::require_file(p.record, "record header");
          return read_wfdb(p.record, p.channel);
        }
        detail::require_file(p.in, "input CSV");
        return read_csv(p.in, p.fs);
      }();
      if (p.duration > 0.0) s = take_prefix(s, p.duration);
      if (p.resample_fs > 0.0 && p.resample_fs != s.fs()) s = resample(s, p.resample_fs);
      write_csv(s, p.out);
      out << "ingest: " << s.label() << ", " << s.size() << " samples at " << s.fs() << " Hz -> " << p.out << "\n";
    } else if (p.subcommand == "contaminate") {
      detail::require_file(p.in, "clean CSV");
      detail::require_file(p.noise, "noise CSV");
      const Signal clean = read_csv(p.in, p.fs);
      Signal noise = read_csv(p.noise, p.noise_fs);
      if (noise.fs() != clean.fs()) noise = resample(noise, clean.fs());
      ContaminationSpec cs;
      cs.target_mad = p.target_mad;
      cs.noise_kind = NoiseKind::RealRecord;
      const auto c = contaminate(clean, noise, cs);
      write_csv(c.noisy, p.out);
      out << "contaminate: scale=" << format_sample(c.scale) << " MAD=" << format_sample(mad(clean, c.noisy)) << " -> "
          << p.out << "\n";
    } else if (p.subcommand == "detect") {
      detail::require_file(p.in, "input CSV");
      const auto ann = detect_r_peaks(read_csv(p.in, p.fs));
      write_annotations_csv(ann, p.out);
      out << "detect: " << ann.size() << " R peaks -> " << p.out << "\n";
    } else if (p.subcommand == "denoise") {
      detail::require_file(p.in, "input CSV");
      const Signal s = read_csv(p.in, p.fs);
      std::optional<BeatAnnotations> ann;
      if (!p.ann.empty()) {
        detail::require_file(p.ann, "annotation file");
        ann = read_annotations_csv(p.ann, p.fs);
      }
      const Signal y = denoise(*p.method, s, p.config, ann ? &*ann : nullptr);
      out << "denoise " << method_info(*p.method).key << ":";
      if (!p.out.empty()) {
        write_csv(y, p.out);
        out << " -> " << p.out;
      }
      if (!p.ref.empty()) {
        detail::require_file(p.ref, "reference CSV");
        out << " " << detail::metrics_line(evaluate(read_csv(p.ref, p.fs), y));
      }
      out << "\n";
    } else if (p.subcommand == "evaluate") {
      detail::require_file(p.ref, "reference CSV");
      detail::require_file(p.test, "test CSV");
      out << detail::metrics_line(evaluate(read_csv(p.ref, p.fs), read_csv(p.test, p.fs))) << "\n";
    } else if (p.subcommand == "bench") {
      detail::require_file(p.spec, "experiment spec");
      auto spec = parse_experiment_spec(read_text_file(p.spec));
      if (p.seed_given && p.seed != spec.seed) {
        // Re-parse so the seed reaches every seeded default.
        auto doc = json::parse(read_text_file(p.spec));
        doc["seed"] = p.seed;
        spec = parse_experiment_spec(doc.dump());
      }
      const auto base = std::filesystem::absolute(p.spec).parent_path();
      if (p.verbosity > 0) err << "bench: running " << spec.methods.size() << " methods on " << spec.signals.size()
                               << " record(s) with " << p.jobs << " job(s)\n";
      const auto result = run_experiment(spec, base, p.jobs);
      const auto written = emit_report(result, p.out, p.formats, p.plot_data);
      if (std::find(p.formats.begin(), p.formats.end(), ReportFormat::Markdown) != p.formats.end())
        out << render_markdown(result);
      out << "bench: hash " << determinism_hash(result) << ", " << written.size() << " file(s) in " << p.out << "\n";
    } else {
      throw UsageError("unknown subcommand '" + p.subcommand + "'");
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << p.subcommand << ": " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    err << "internal error: " << p.subcommand << ": " << e.what() << "\n";
    return kExitInternal;
  }
}

/// parse_args + execute with exit-code mapping.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CommandPlan plan;
  try {
    plan = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.text << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return execute(plan, out, err);
}

}  // namespace blw::cli
