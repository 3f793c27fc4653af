#include "vizcap/service.hpp"

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "vizcap/analysis_io.hpp"
#include "vizcap/chart.hpp"
#include "vizcap/dataset.hpp"
#include "vizcap/session.hpp"
#include "vizcap/study.hpp"

namespace vizcap {

using nlohmann::json;

namespace {

int StatusFor(ErrorCode code) {
  if (IsGatewayError(code)) return 502;
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kBudgetExceeded: return 422;
    case ErrorCode::kIo: return 500;
    default: return 400;
  }
}

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, ErrorCode code, const std::string& message) {
  SendJson(res, StatusFor(code), {{"error", ToString(code)}, {"message", message}});
}

json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = ParseJsonText(req.body, "request body");
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "request body must be a JSON object");
  return j;
}

AnalysisRequest AnalysisRequestFromJson(const json& j) {
  AnalysisRequest r;
  r.x = j.at("x").get<std::string>();
  r.y = j.at("y").get<std::string>();
  if (j.contains("label") && !j["label"].is_null()) r.label = j["label"].get<std::string>();
  r.title = j.value("title", std::string{});
  r.method = ParseAnalysisMethod(j.value("method", std::string("regression")));
  r.regression.threshold = j.value("threshold", kDefaultOutlierThreshold);
  r.cluster.eps = j.value("eps", r.cluster.eps);
  r.cluster.min_pts = j.value("min_pts", r.cluster.min_pts);
  r.cluster.scale = ParseFeatureScale(j.value("scale", std::string("zscore")));
  r.naming.entity_noun = j.value("entity_noun", std::string("points"));
  r.naming.x_noun = j.value("x_noun", std::string{});
  r.naming.y_noun = j.value("y_noun", std::string{});
  if (j.contains("descriptions")) {
    for (const auto& [key, value] : j["descriptions"].items()) {
      r.naming.overrides[std::stoi(key)] = value.get<std::string>();
    }
  }
  return r;
}

json CandidatesJson(const AnalysisDocument& doc) {
  const auto full = ToJson(doc);
  return full.contains("regression") ? full["regression"]["candidates"] : json::array();
}

}  // namespace

struct CaptionService::Impl {
  struct AnalysisEntry {
    AnalysisDocument doc;
    bool confirmed = false;
  };

  struct SessionSlot {
    std::mutex writer;        // held for the whole turn; try_lock gives 409
    mutable std::mutex state; // guards snapshot
    Session snapshot;
    explicit SessionSlot(Session s) : snapshot(std::move(s)) {}
  };

  AppConfig config;
  std::shared_ptr<CompletionBackend> backend;
  httplib::Server server;
  std::thread thread;

  std::shared_mutex mu;
  std::map<std::string, std::shared_ptr<const DataTable>> tables;
  std::map<std::string, AnalysisEntry> analyses;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions;
  std::vector<Ballot> ballots;
  std::vector<EngagementVote> votes;
  std::atomic<std::size_t> next_id{1};

  Impl(AppConfig c, std::shared_ptr<CompletionBackend> b) : config(std::move(c)), backend(std::move(b)) {
    if (!backend) throw Error(ErrorCode::kConfig, "service needs a completion backend");
    Routes();
  }

  std::string NextId(std::string_view prefix) { return std::string(prefix) + std::to_string(next_id++); }

  template <typename Fn>
  auto Guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        SendError(res, e.code(), e.what());
      } catch (const json::exception& e) {
        SendError(res, ErrorCode::kValidation, e.what());
      } catch (const std::exception& e) {
        SendJson(res, 500, {{"error", "internal"}, {"message", e.what()}});
      }
    };
  }

  std::shared_ptr<SessionSlot> FindSession(const std::string& id) {
    std::shared_lock lock(mu);
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
    return it->second;
  }

  AnalysisEntry FindAnalysis(const std::string& id) {
    std::shared_lock lock(mu);
    const auto it = analyses.find(id);
    if (it == analyses.end()) throw Error(ErrorCode::kNotFound, "unknown analysis '" + id + "'");
    return it->second;
  }

  std::mutex record_mu;

  void Persist(const Session& s) {
    if (!config.record_cassette_path.empty()) {
      if (const auto rec = std::dynamic_pointer_cast<RecordingBackend>(backend)) {
        std::lock_guard lock(record_mu);
        SaveCassette(rec->Snapshot(), config.record_cassette_path);
      }
    }
    if (config.transcript_dir.empty()) return;
    std::filesystem::create_directories(config.transcript_dir);
    SaveTranscript(s, (std::filesystem::path(config.transcript_dir) / (s.id() + ".json")).string());
  }

  json SessionView(const Session& s) {
    json j = s.ToJson();
    j["caption"] = s.latest_caption();
    j["pending"] = s.has_pending_turn();
    return j;
  }

  // Runs a mutation on a session while holding its writer lock. A second
  // writer gets 409 instead of queueing.
  template <typename Mutation>
  void MutateSession(const std::string& id, httplib::Response& res, Mutation mutate) {
    auto slot = FindSession(id);
    std::unique_lock writer(slot->writer, std::try_to_lock);
    if (!writer.owns_lock()) {
      throw Error(ErrorCode::kConflict, "another turn is in progress on session '" + id + "'");
    }
    Session working = [&] {
      std::lock_guard lock(slot->state);
      return slot->snapshot;
    }();
    try {
      mutate(working);
    } catch (const Error& e) {
      if (IsGatewayError(e.code())) {
        // The turn stays pending so the client can retry or discard it.
        std::lock_guard lock(slot->state);
        slot->snapshot = working;
      }
      throw;
    }
    {
      std::lock_guard lock(slot->state);
      slot->snapshot = working;
    }
    Persist(working);
    SendJson(res, 200, SessionView(working));
  }

  void Routes() {
    server.Post("/datasets", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      CsvOptions options;
      options.source_name = req.has_param("name") ? req.get_param_value("name") : "upload";
      options.has_header = !(req.has_param("header") && req.get_param_value("header") == "0");
      auto table = LoadCsv(req.body, options);
      const std::string id = NextId("tbl-");
      json columns = json::array();
      for (const auto& c : table->columns()) {
        columns.push_back({{"name", c.name}, {"kind", c.kind == ColumnKind::kNumeric ? "numeric" : "categorical"}});
      }
      const auto rows = table->row_count();
      {
        std::unique_lock lock(mu);
        tables[id] = std::move(table);
      }
      SendJson(res, 201, {{"table_id", id}, {"columns", columns}, {"rows", rows}});
    }));

    server.Post("/analyses", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = ParseBody(req);
      const auto table_id = body.at("table_id").get<std::string>();
      std::shared_ptr<const DataTable> table;
      {
        std::shared_lock lock(mu);
        const auto it = tables.find(table_id);
        if (it == tables.end()) throw Error(ErrorCode::kNotFound, "unknown table '" + table_id + "'");
        table = it->second;
      }
      AnalysisEntry entry{RunAnalysis(table, AnalysisRequestFromJson(body)), false};
      const auto* reg = std::get_if<RegressionResult>(&entry.doc.result);
      entry.confirmed = reg == nullptr || reg->candidates.empty();
      const std::string id = NextId("ana-");
      json reply = {{"analysis_id", id},
                    {"needs_confirmation", !entry.confirmed},
                    {"candidates", CandidatesJson(entry.doc)},
                    {"analysis", ToJson(entry.doc)}};
      {
        std::unique_lock lock(mu);
        analyses[id] = std::move(entry);
      }
      SendJson(res, 201, reply);
    }));

    server.Get(R"(/analyses/([^/]+))", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto entry = FindAnalysis(req.matches[1]);
      SendJson(res, 200, {{"analysis_id", req.matches[1]},
                          {"needs_confirmation", !entry.confirmed},
                          {"analysis", ToJson(entry.doc)}});
    }));

    server.Post(R"(/analyses/([^/]+)/confirm)", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto body = ParseBody(req);
      const auto accepted = body.value("accepted", std::vector<std::size_t>{});
      std::unique_lock lock(mu);
      const auto it = analyses.find(id);
      if (it == analyses.end()) throw Error(ErrorCode::kNotFound, "unknown analysis '" + id + "'");
      auto* reg = std::get_if<RegressionResult>(&it->second.doc.result);
      if (reg == nullptr) throw Error(ErrorCode::kValidation, "only regression analyses have outliers to confirm");
      *reg = ConfirmOutliers(*reg, accepted);
      it->second.confirmed = true;
      SendJson(res, 200, {{"analysis_id", id}, {"needs_confirmation", false}, {"analysis", ToJson(it->second.doc)}});
    }));

    server.Get(R"(/charts/([^/]+)\.svg)", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto entry = FindAnalysis(req.matches[1]);
      res.status = 200;
      res.set_content(RenderScatter(ChartSpecFor(entry.doc)).svg, "image/svg+xml");
    }));

    server.Post("/sessions", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = ParseBody(req);
      const auto entry = FindAnalysis(body.at("analysis_id").get<std::string>());
      if (!entry.confirmed) {
        throw Error(ErrorCode::kConflict, "outlier candidates must be confirmed before captioning");
      }
      GenerationParams params = config.params;
      if (body.contains("params")) {
        json merged = ToJson(params);
        merged.update(body["params"]);
        params = GenerationParamsFromJson(merged);
      }
      PromptStyle style = config.style;
      if (body.contains("style")) style = ParsePromptStyle(body["style"].get<std::string>());
      Session s = Session::Start(MetadataFromAnalysis(entry.doc), params, *backend, style);
      if (!config.cassette_path.empty()) s.cassette_path = config.cassette_path;
      const json view = SessionView(s);
      Persist(s);
      {
        std::unique_lock lock(mu);
        std::string id = s.id();
        sessions.emplace(std::move(id), std::make_shared<SessionSlot>(std::move(s)));
      }
      SendJson(res, 201, view);
    }));

    server.Get(R"(/sessions/([^/]+))", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto slot = FindSession(req.matches[1]);
      std::lock_guard lock(slot->state);
      SendJson(res, 200, SessionView(slot->snapshot));
    }));

    server.Post(R"(/sessions/([^/]+)/turns)", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = ParseBody(req);
      const auto kind = ParseTurnKind(body.at("kind").get<std::string>());
      const auto text = body.at("text").get<std::string>();
      MutateSession(req.matches[1], res, [&](Session& s) { s.Advance(text, kind, *backend); });
    }));

    server.Post(R"(/sessions/([^/]+)/retry)", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      MutateSession(req.matches[1], res, [&](Session& s) { s.RetryPending(*backend); });
    }));

    server.Post(R"(/sessions/([^/]+)/discard)", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      MutateSession(req.matches[1], res, [&](Session& s) { s.DiscardPending(); });
    }));

    server.Post("/eval/ballots", Guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::vector<Ballot> new_ballots;
      std::vector<EngagementVote> new_votes;
      const auto content_type = req.get_header_value("Content-Type");
      if (content_type.rfind("text/csv", 0) == 0) {
        if (req.has_param("kind") && req.get_param_value("kind") == "engagement") {
          new_votes = ParseEngagementCsv(req.body);
        } else {
          new_ballots = ParseBallotCsv(req.body);
        }
      } else {
        const auto body = ParseBody(req);
        for (const auto& b : body.value("ballots", json::array())) new_ballots.push_back(BallotFromJson(b));
        for (const auto& v : body.value("votes", json::array())) new_votes.push_back(EngagementVoteFromJson(v));
      }
      std::unique_lock lock(mu);
      auto merged_ballots = ballots;
      merged_ballots.insert(merged_ballots.end(), new_ballots.begin(), new_ballots.end());
      auto merged_votes = votes;
      merged_votes.insert(merged_votes.end(), new_votes.begin(), new_votes.end());
      Summarize(merged_ballots, merged_votes);  // rejects duplicates before anything is stored
      ballots = std::move(merged_ballots);
      votes = std::move(merged_votes);
      SendJson(res, 200, {{"ballots", ballots.size()}, {"votes", votes.size()}});
    }));

    server.Get("/eval/summary", Guarded([this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mu);
      SendJson(res, 200, ToJson(Summarize(ballots, votes)));
    }));

    server.Get(R"(/eval/summary\.svg)", Guarded([this](const httplib::Request&, httplib::Response& res) {
      EvalSummary summary;
      {
        std::shared_lock lock(mu);
        summary = Summarize(ballots, votes);
      }
      res.status = 200;
      res.set_content(RenderStackedBars(summary), "image/svg+xml");
    }));
  }
};

CaptionService::CaptionService(AppConfig config, std::shared_ptr<CompletionBackend> backend)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backend))) {}

CaptionService::~CaptionService() { Stop(); }

int CaptionService::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void CaptionService::Run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void CaptionService::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace vizcap
