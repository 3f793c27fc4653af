#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "vizcap/analysis.hpp"
#include "vizcap/analysis_io.hpp"
#include "vizcap/chart.hpp"
#include "vizcap/config.hpp"
#include "vizcap/dataset.hpp"
#include "vizcap/service.hpp"
#include "vizcap/session.hpp"
#include "vizcap/study.hpp"

namespace vizcap::cli {
namespace {

namespace fs = std::filesystem;

// Raised for bad invocations that CLI11 cannot see (missing files, flag combos).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void RequireFile(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("cannot open '" + path + "': no such file");
}

std::string Fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Backend selection shared by caption, session and serve.
struct BackendFlags {
  std::string config_path;
  std::string backend;
  std::string cassette;
  std::string record;
  std::string endpoint;
  std::string style;
  std::vector<std::string> settings;  // key=value

  void Attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "Config file (key = value lines)");
    cmd.add_option("--backend", backend, "http | stub | replay");
    cmd.add_option("--cassette", cassette, "Cassette to replay");
    cmd.add_option("--record", record, "Record every exchange to this cassette");
    cmd.add_option("--endpoint", endpoint, "Completions URL for the http backend");
    cmd.add_option("--style", style, "Prompt wording: standard | compact");
    cmd.add_option("--set", settings, "Extra config setting as key=value");
  }

  AppConfig Resolve() const {
    AppConfig config;
    if (!config_path.empty()) {
      RequireFile(config_path);
      config = LoadConfig(config_path);
    }
    if (!backend.empty()) ApplySetting(config, "backend", backend);
    if (!cassette.empty()) {
      RequireFile(cassette);
      ApplySetting(config, "cassette", cassette);
    }
    if (!record.empty()) ApplySetting(config, "record_cassette", record);
    if (!endpoint.empty()) ApplySetting(config, "endpoint", endpoint);
    if (!style.empty()) ApplySetting(config, "prompt_style", style);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      ApplySetting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    Validate(config);
    return config;
  }
};

void SaveRecording(const AppConfig& config, const std::shared_ptr<CompletionBackend>& backend) {
  if (config.record_cassette_path.empty()) return;
  if (const auto rec = std::dynamic_pointer_cast<RecordingBackend>(backend)) {
    SaveCassette(rec->Snapshot(), config.record_cassette_path);
  }
}

std::string DefaultTranscriptPath(const std::string& analysis_path) {
  std::string base = analysis_path;
  const std::string suffix = ".analysis.json";
  if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
    base.resize(base.size() - suffix.size());
  } else if (fs::path(base).has_extension()) {
    base = (fs::path(base).parent_path() / fs::path(base).stem()).string();
  }
  return base + ".transcript.json";
}

VisualizationMetadata LoadMetadata(const std::string& analysis_path) {
  RequireFile(analysis_path);
  const auto doc = LoadAnalysisFile(analysis_path);
  return MetadataFromAnalysis(doc);
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string csv;
  std::string x, y, label, title;
  std::string method = "regression";
  double threshold = kDefaultOutlierThreshold;
  double eps = 0.5;
  int min_pts = 4;
  std::string scale = "zscore";
  std::string entity_noun = "points";
  std::string x_noun, y_noun;
  std::vector<std::string> describe;  // id=text
  bool accept_all = false;
  bool reject_all = false;
  bool no_header = false;
  std::string out;
};

std::vector<std::size_t> ConfirmInteractively(const RegressionResult& reg, std::istream& in, std::ostream& out) {
  std::vector<std::size_t> accepted;
  for (const auto& c : reg.candidates) {
    out << "Keep outlier '" << c.label << "' (row " << c.row_index << ", t = " << Fixed(c.t_value, 2) << ")? [y/N] "
        << std::flush;
    std::string answer;
    if (!std::getline(in, answer)) answer.clear();
    if (!answer.empty() && (answer[0] == 'y' || answer[0] == 'Y')) accepted.push_back(c.row_index);
  }
  return accepted;
}

int CmdAnalyze(const AnalyzeArgs& a, std::istream& in, std::ostream& out) {
  RequireFile(a.csv);
  if (a.accept_all && a.reject_all) throw UsageError("--accept-all and --reject-all are exclusive");

  AnalysisRequest req;
  req.x = a.x;
  req.y = a.y;
  if (!a.label.empty()) req.label = a.label;
  req.title = a.title;
  req.method = ParseAnalysisMethod(a.method);
  req.regression.threshold = a.threshold;
  req.cluster = {a.eps, a.min_pts, ParseFeatureScale(a.scale)};
  req.naming.entity_noun = a.entity_noun;
  req.naming.x_noun = a.x_noun;
  req.naming.y_noun = a.y_noun;
  for (const auto& d : a.describe) {
    const auto eq = d.find('=');
    if (eq == std::string::npos) throw UsageError("--describe expects <cluster id>=<text>, got '" + d + "'");
    try {
      req.naming.overrides[std::stoi(d.substr(0, eq))] = d.substr(eq + 1);
    } catch (const std::logic_error&) {
      throw UsageError("--describe: '" + d.substr(0, eq) + "' is not a cluster id");
    }
  }

  CsvOptions options;
  options.has_header = !a.no_header;
  options.source_name = fs::path(a.csv).filename().string();
  auto doc = RunAnalysis(LoadCsvFile(a.csv, options), req);

  if (auto* reg = std::get_if<RegressionResult>(&doc.result)) {
    out << "intercept " << Fixed(reg->intercept, 4) << ", slope " << Fixed(reg->slope, 4) << ", r "
        << Fixed(reg->pearson_r, 4) << "\n";
    out << reg->candidates.size() << " outlier candidate(s) with |t| > " << Fixed(reg->threshold, 2) << "\n";
    std::vector<std::size_t> accepted;
    if (a.accept_all) {
      for (const auto& c : reg->candidates) accepted.push_back(c.row_index);
    } else if (!a.reject_all) {
      accepted = ConfirmInteractively(*reg, in, out);
    }
    *reg = ConfirmOutliers(*reg, accepted);
    for (const auto& c : reg->confirmed) out << "  confirmed: " << c.label << " (" << ToString(c.direction) << ")\n";
  } else {
    const auto& cl = std::get<ClusterResult>(doc.result);
    out << cl.n_clusters << " cluster(s), " << cl.noise_indices.size() << " noise point(s)\n";
    for (std::size_t i = 0; i < cl.sizes_ranked.size(); ++i) {
      out << "  #" << cl.sizes_ranked[i].cluster_id << " " << cl.sizes_ranked[i].size << " " << cl.entity_noun
          << ": " << cl.descriptions[i].text << "\n";
    }
  }

  const std::string name = a.out.empty() ? fs::path(a.csv).stem().string() : a.out;
  SaveAnalysisFile(doc, name + ".analysis.json");
  WriteTextFile(name + ".svg", RenderScatter(ChartSpecFor(doc)).svg);
  out << "wrote " << name << ".analysis.json and " << name << ".svg\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// kdist

int CmdKdist(const std::string& csv, const std::string& x, const std::string& y, int k, const std::string& scale,
             std::ostream& out) {
  RequireFile(csv);
  const auto points = CollectPoints(SelectAxes(LoadCsvFile(csv), x, y));
  const auto scaled = ScaleFeatures(points.points, ParseFeatureScale(scale));
  for (double d : KDistanceCurve(scaled, k)) out << Fixed(d, 6) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// caption

int CmdCaption(const std::string& analysis, int tier, const std::string& instruction, const BackendFlags& flags,
               std::string transcript, std::ostream& out) {
  if (tier == 2 && instruction.empty()) throw UsageError("tier 2 needs --instruction");
  if (tier == 1 && !instruction.empty()) throw UsageError("--instruction only applies to tier 2");
  const auto meta = LoadMetadata(analysis);
  const auto config = flags.Resolve();
  const auto backend = MakeBackend(config);

  Session s = Session::Start(meta, config.params, *backend, config.style);
  if (!config.cassette_path.empty()) s.cassette_path = config.cassette_path;
  if (tier == 2) s.Advance(instruction, TurnKind::kInstruction, *backend);
  SaveRecording(config, backend);

  out << "Prompt:\n" << s.last_prompt() << "\n\nCaption:\n" << s.latest_caption() << "\n";
  if (transcript.empty()) transcript = DefaultTranscriptPath(analysis);
  SaveTranscript(s, transcript);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// session REPL

void ShowCaption(const Session& s, std::ostream& out) {
  out << "[tier " << static_cast<int>(s.tier()) << ", caption " << s.captions().size() - 1 << "]\n"
      << s.latest_caption() << "\n";
}

int CmdSession(const std::string& analysis, const BackendFlags& flags, std::string transcript, std::istream& in,
               std::ostream& out, std::ostream& err) {
  const auto meta = LoadMetadata(analysis);
  const auto config = flags.Resolve();
  const auto backend = MakeBackend(config);
  if (transcript.empty()) transcript = DefaultTranscriptPath(analysis);

  Session s = Session::Start(meta, config.params, *backend, config.style);
  if (!config.cassette_path.empty()) s.cassette_path = config.cassette_path;
  ShowCaption(s, out);
  out << "First line is an instruction, later lines are questions. "
         ":edit <text>, :retry, :discard, :save [path], :quit\n";

  auto attempt = [&](auto&& step) {
    try {
      step();
      ShowCaption(s, out);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      if (s.has_pending_turn()) err << "turn is pending; :retry or :discard\n";
    }
  };

  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == ":quit" || line == ":q") break;
    if (line == ":retry") {
      attempt([&] { s.RetryPending(*backend); });
    } else if (line == ":discard") {
      attempt([&] { s.DiscardPending(); });
    } else if (line.rfind(":save", 0) == 0) {
      std::string path = line.size() > 5 ? line.substr(line.find_first_not_of(' ', 5)) : transcript;
      SaveTranscript(s, path);
      out << "saved " << path << "\n";
    } else if (line.rfind(":edit ", 0) == 0) {
      attempt([&] { s.Advance(line.substr(6), TurnKind::kEdit, *backend); });
    } else if (line[0] == ':') {
      err << "unknown command " << line << "\n";
    } else {
      const TurnKind kind = s.doc().turns.empty() ? TurnKind::kInstruction : TurnKind::kQuestion;
      attempt([&] { s.Advance(line, kind, *backend); });
    }
  }
  SaveRecording(config, backend);
  SaveTranscript(s, transcript);
  out << "\nsaved " << transcript << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int CmdEval(const std::string& ballots_path, const std::string& engagement_path, const std::string& json_path,
            const std::string& svg_path, std::ostream& out) {
  RequireFile(ballots_path);
  if (!engagement_path.empty()) RequireFile(engagement_path);
  const auto ballots = ParseBallotCsv(ReadTextFile(ballots_path));
  const auto votes =
      engagement_path.empty() ? std::vector<EngagementVote>{} : ParseEngagementCsv(ReadTextFile(engagement_path));
  const auto summary = Summarize(ballots, votes);

  out << summary.n_participants << " participant(s), " << summary.n_visualizations << " visualization(s)\n";
  out << "quality          T1   T2   T3  none-first\n";
  for (std::size_t q = 0; q < kQualityCount; ++q) {
    const auto& t = summary.qualities[q];
    char row[96];
    std::snprintf(row, sizeof row, "%-14s %4zu %4zu %4zu %11zu\n", std::string(ToString(static_cast<Quality>(q))).c_str(),
                  t.top[0], t.top[1], t.top[2], t.none_first);
    out << row;
  }
  if (!votes.empty()) {
    char row[96];
    std::snprintf(row, sizeof row, "%-14s %4zu %4zu %4zu\n", "engagement", summary.engagement[0], summary.engagement[1],
                  summary.engagement[2]);
    out << row;
  }
  if (!json_path.empty()) WriteTextFile(json_path, ToJson(summary).dump(2) + "\n");
  if (!svg_path.empty()) WriteTextFile(svg_path, RenderStackedBars(summary));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

int CmdServe(const BackendFlags& flags, const std::string& listen, std::ostream& out) {
  auto config = flags.Resolve();
  if (!listen.empty()) ApplySetting(config, "listen", listen);
  CaptionService service(config, MakeBackend(config));
  out << "serving on http://" << config.listen_host << ":" << config.listen_port << "\n" << std::flush;
  service.Run(config.listen_host, config.listen_port);
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caption workbench: analyze CSV data, render charts, generate and refine captions"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Run regression or clustering and write <name>.analysis.json + <name>.svg");
  analyze->add_option("csv", an.csv, "Input CSV")->required();
  analyze->add_option("--x", an.x, "X axis column")->required();
  analyze->add_option("--y", an.y, "Y axis column")->required();
  analyze->add_option("--label", an.label, "Categorical column naming each point");
  analyze->add_option("--title", an.title, "Chart title (default '<x> VS <y>')");
  analyze->add_option("--method", an.method, "regression | cluster")->check(CLI::IsMember({"regression", "cluster"}));
  analyze->add_option("--threshold", an.threshold, "Outlier |t| threshold")->check(CLI::PositiveNumber);
  analyze->add_option("--eps", an.eps, "DBSCAN neighbourhood radius");
  analyze->add_option("--min-pts", an.min_pts, "DBSCAN core point threshold");
  analyze->add_option("--scale", an.scale, "zscore | none")->check(CLI::IsMember({"zscore", "none"}));
  analyze->add_option("--entity-noun", an.entity_noun, "What a point is, e.g. customers");
  analyze->add_option("--x-noun", an.x_noun, "Noun for x in cluster descriptions");
  analyze->add_option("--y-noun", an.y_noun, "Noun for y in cluster descriptions");
  analyze->add_option("--describe", an.describe, "Override a cluster description: <id>=<text>");
  analyze->add_flag("--accept-all", an.accept_all, "Confirm every outlier candidate");
  analyze->add_flag("--reject-all", an.reject_all, "Confirm no outlier candidate");
  analyze->add_flag("--no-header", an.no_header, "The CSV has no header row");
  analyze->add_option("-o,--out", an.out, "Output name (default: CSV file stem)");

  std::string kd_csv, kd_x, kd_y, kd_scale = "zscore";
  int kd_k = 4;
  auto* kdist = app.add_subcommand("kdist", "Print the sorted k-distance curve for choosing eps");
  kdist->add_option("csv", kd_csv, "Input CSV")->required();
  kdist->add_option("--x", kd_x)->required();
  kdist->add_option("--y", kd_y)->required();
  kdist->add_option("-k", kd_k, "Neighbour rank (usually min_pts)");
  kdist->add_option("--scale", kd_scale, "zscore | none")->check(CLI::IsMember({"zscore", "none"}));

  std::string cap_analysis, cap_instruction, cap_transcript;
  int cap_tier = 1;
  BackendFlags cap_flags;
  auto* caption = app.add_subcommand("caption", "Generate a tier 1 or tier 2 caption");
  caption->add_option("analysis", cap_analysis, "Analysis JSON")->required();
  caption->add_option("--tier", cap_tier, "1 or 2")->check(CLI::Range(1, 2));
  caption->add_option("--instruction", cap_instruction, "Instruction sentence (tier 2)");
  caption->add_option("--transcript", cap_transcript, "Transcript output path");
  cap_flags.Attach(*caption);

  std::string ses_analysis, ses_transcript;
  BackendFlags ses_flags;
  auto* session = app.add_subcommand("session", "Interactive caption refinement");
  session->add_option("analysis", ses_analysis, "Analysis JSON")->required();
  session->add_option("--transcript", ses_transcript, "Transcript output path");
  ses_flags.Attach(*session);

  std::string ev_ballots, ev_engagement, ev_json, ev_svg;
  auto* eval = app.add_subcommand("eval", "Tally ranking ballots");
  eval->add_option("ballots", ev_ballots, "Ballot CSV")->required();
  eval->add_option("--engagement", ev_engagement, "Engagement vote CSV");
  eval->add_option("--json", ev_json, "Write the summary JSON here");
  eval->add_option("--svg", ev_svg, "Write the stacked bar chart here");

  std::string srv_listen;
  BackendFlags srv_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--listen", srv_listen, "host:port");
  srv_flags.Attach(*serve);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return CmdAnalyze(an, in, out);
    if (*kdist) return CmdKdist(kd_csv, kd_x, kd_y, kd_k, kd_scale, out);
    if (*caption) return CmdCaption(cap_analysis, cap_tier, cap_instruction, cap_flags, cap_transcript, out);
    if (*session) return CmdSession(ses_analysis, ses_flags, ses_transcript, in, out, err);
    if (*eval) return CmdEval(ev_ballots, ev_engagement, ev_json, ev_svg, out);
    if (*serve) return CmdServe(srv_flags, srv_listen, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << ToString(e.code()) << "]: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace vizcap::cli
