#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "generators.hpp"
#include "optimizer.hpp"
#include "penalties.hpp"
#include "trajectories.hpp"

namespace clpm::io {

/// File could not be opened, written or renamed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; `line` is 1-based (0 when not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ReadEventsOptions {
  std::optional<double> horizon;  // defaults to the largest event time
  // When set, labels must come from this list and keep its ids; otherwise ids
  // are assigned in order of first appearance.
  std::optional<std::vector<std::string>> known_labels;
};

/// CSV with header `time,source,target`.
EventList read_events(const std::string& path, const ReadEventsOptions& options = {});
EventList parse_events(const std::string& text, const ReadEventsOptions& options = {});
void write_events(const EventList& events, const std::string& path);

struct FitMetadata {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::optional<double> final_objective;
};

struct ModelFile {
  ModelState state;
  ChangePointGrid grid;
  std::vector<std::string> labels;
  PenaltyParams penalty;
  FitMetadata fit;
};

/// JSON model document (see README for the schema).
void write_model(const ModelFile& model, const std::string& path);
ModelFile read_model(const std::string& path);
std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);

/// `time,node,x,y[,...]` rows at every requested time for every node.
void write_snapshots(const ModelState& state, const ChangePointGrid& grid,
                     const std::vector<std::string>& labels, const std::vector<double>& times,
                     const std::string& path);

void write_trace(const std::vector<TracePoint>& trace, const std::string& path);

/// `segment_start,segment_end,node,cluster` for a blockmodel schedule.
void write_memberships(const generators::BlockSchedule& schedule, const std::string& path);

/// `start:end:count` (uniform, inclusive) or an explicit comma-separated list.
std::vector<double> parse_time_grid(const std::string& spec);

/// Writes `contents` to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace clpm::io
