#pragma once

#include <memory>
#include <string>

#include "vizcap/config.hpp"
#include "vizcap/llm.hpp"

namespace vizcap {

// HTTP front end over the library, state held in memory.
//
//   POST /datasets                 CSV body (?name=, ?header=0) -> {"table_id", "columns", "rows"}
//   POST /analyses                 {"table_id","x","y","method",...} -> {"analysis_id","candidates",...}
//   GET  /analyses/{id}            analysis document
//   POST /analyses/{id}/confirm    {"accepted": [row_index...]}
//   GET  /charts/{id}.svg          scatter plot (image/svg+xml)
//   POST /sessions                 {"analysis_id"} -> session with the tier-1 caption
//   GET  /sessions/{id}            session snapshot
//   POST /sessions/{id}/turns      {"kind","text"} -> session with the new caption
//   POST /sessions/{id}/retry      retry a pending turn
//   POST /sessions/{id}/discard    drop a pending turn
//   POST /eval/ballots             {"ballots": [...], "votes": [...]} or ballot CSV
//   GET  /eval/summary             EvalSummary JSON
//   GET  /eval/summary.svg         stacked bar chart
//
// Errors are {"error": code, "message"}: 400 validation, 404 unknown id,
// 409 a turn already running on the session (or unconfirmed outliers),
// 422 token budget exceeded, 502 completion backend failure.
class CaptionService {
 public:
  CaptionService(AppConfig config, std::shared_ptr<CompletionBackend> backend);
  ~CaptionService();
  CaptionService(const CaptionService&) = delete;
  CaptionService& operator=(const CaptionService&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vizcap
