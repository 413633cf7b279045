#include "io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace clpm::io {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

std::string coordinate_header(std::size_t dim) {
  if (dim <= 3) {
    static const char* names[] = {"x", "y", "z"};
    std::string out;
    for (std::size_t c = 0; c < dim; ++c) out += std::string(",") + names[c];
    return out;
  }
  std::string out;
  for (std::size_t c = 0; c < dim; ++c) out += ",x" + std::to_string(c + 1);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("error while writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move '" + tmp + "' to '" + path + "'");
  }
}

EventList parse_events(const std::string& text, const ReadEventsOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  std::vector<std::string> labels;
  std::map<std::string, NodeId> ids;
  if (options.known_labels) {
    labels = *options.known_labels;
    for (NodeId k = 0; k < labels.size(); ++k) ids.emplace(labels[k], k);
  }
  auto node_id = [&](const std::string& label, std::size_t at) -> NodeId {
    auto it = ids.find(label);
    if (it != ids.end()) return it->second;
    if (options.known_labels) {
      throw ParseError("line " + std::to_string(at) + ": unknown node '" + label + "'", at);
    }
    const auto id = static_cast<NodeId>(labels.size());
    labels.push_back(label);
    ids.emplace(label, id);
    return id;
  };

  std::vector<Event> events;
  double max_time = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto fields = split(stripped, ',');
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "time" || fields[1] != "source" ||
          fields[2] != "target") {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header 'time,source,target'",
                         line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    double t = 0.0;
    if (!parse_number(fields[0], t) || t < 0.0) {
      throw ParseError("line " + std::to_string(line_no) + ": invalid time '" + fields[0] + "'",
                       line_no);
    }
    const std::string a = unquote(fields[1]);
    const std::string b = unquote(fields[2]);
    if (a.empty() || b.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty node label", line_no);
    }
    if (a == b) {
      throw ParseError("line " + std::to_string(line_no) + ": self-loop on node '" + a + "'",
                       line_no);
    }
    const NodeId ia = node_id(a, line_no);
    const NodeId ib = node_id(b, line_no);
    if (options.horizon && t > *options.horizon) {
      throw ParseError("line " + std::to_string(line_no) + ": time " + fields[0] +
                           " exceeds the horizon",
                       line_no);
    }
    max_time = std::max(max_time, t);
    events.push_back({t, ia, ib});
  }
  if (!have_header) throw ParseError("missing header 'time,source,target'", 0);
  const double horizon = options.horizon.value_or(max_time);
  const std::size_t n = labels.size();
  return EventList(std::move(events), horizon, n, std::move(labels));
}

EventList read_events(const std::string& path, const ReadEventsOptions& options) {
  const std::string text = read_file(path);
  try {
    return parse_events(text, options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void write_events(const EventList& events, const std::string& path) {
  std::ostringstream out;
  out << "time,source,target\n";
  const auto& labels = events.labels();
  for (const auto& e : events.events()) {
    out << format_double(e.time) << ',' << labels[e.a] << ',' << labels[e.b] << '\n';
  }
  write_file_atomic(path, out.str());
}

std::string model_to_json(const ModelFile& model) {
  const auto& traj = model.state.trajectories;
  json positions = json::array();
  for (std::size_t i = 0; i < traj.num_nodes(); ++i) {
    json node = json::array();
    for (std::size_t k = 0; k < traj.num_knots(); ++k) {
      const auto z = traj.at(i, k);
      node.push_back(std::vector<double>(z.begin(), z.end()));
    }
    positions.push_back(std::move(node));
  }
  json doc = {
      {"format", "clpm-model"},
      {"version", kModelFormatVersion},
      {"variant", to_string(model.state.variant)},
      {"dim", traj.dim()},
      {"beta", model.state.beta},
      {"knots", model.grid.knots()},
      {"nodes", model.labels},
      {"positions", std::move(positions)},
      {"penalty",
       {{"sigma0_sq", model.penalty.sigma0_sq},
        {"sigma_sq", model.penalty.sigma_sq},
        {"mu_angle", model.penalty.mu_angle}}},
      {"fit",
       {{"seed", model.fit.seed},
        {"iterations", model.fit.iterations},
        {"final_objective",
         model.fit.final_objective ? json(*model.fit.final_objective) : json(nullptr)}}},
  };
  return doc.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
  }
  try {
    if (doc.at("format").get<std::string>() != "clpm-model") {
      throw ParseError("not a clpm model file", 0);
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError("unsupported model file version", 0);
    }
    ModelFile model;
    model.grid = ChangePointGrid(doc.at("knots").get<std::vector<double>>());
    model.labels = doc.at("nodes").get<std::vector<std::string>>();
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto& positions = doc.at("positions");
    const std::size_t n = model.labels.size();
    if (positions.size() != n) throw ParseError("positions do not match the node list", 0);
    std::vector<double> values;
    values.reserve(n * model.grid.size() * dim);
    for (const auto& node : positions) {
      if (node.size() != model.grid.size()) {
        throw ParseError("positions do not match the knot count", 0);
      }
      for (const auto& point : node) {
        const auto z = point.get<std::vector<double>>();
        if (z.size() != dim) throw ParseError("position has the wrong dimension", 0);
        values.insert(values.end(), z.begin(), z.end());
      }
    }
    model.state.variant = variant_from_string(doc.at("variant").get<std::string>());
    model.state.beta = doc.at("beta").get<double>();
    model.state.trajectories = TrajectorySet(n, model.grid.size(), dim, std::move(values));
    const auto& pen = doc.at("penalty");
    model.penalty.sigma0_sq = pen.at("sigma0_sq").get<double>();
    model.penalty.sigma_sq = pen.at("sigma_sq").get<double>();
    model.penalty.mu_angle = pen.at("mu_angle").get<double>();
    if (doc.contains("fit")) {
      const auto& f = doc.at("fit");
      model.fit.seed = f.value("seed", std::uint64_t{0});
      model.fit.iterations = f.value("iterations", std::size_t{0});
      if (f.contains("final_objective") && !f.at("final_objective").is_null()) {
        model.fit.final_objective = f.at("final_objective").get<double>();
      }
    }
    model.state.validate(model.grid);
    model.penalty.validate();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  }
}

void write_model(const ModelFile& model, const std::string& path) {
  write_file_atomic(path, model_to_json(model));
}

ModelFile read_model(const std::string& path) {
  try {
    return model_from_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_snapshots(const ModelState& state, const ChangePointGrid& grid,
                     const std::vector<std::string>& labels, const std::vector<double>& times,
                     const std::string& path) {
  const auto& traj = state.trajectories;
  if (labels.size() != traj.num_nodes()) throw DomainError("label count does not match nodes");
  std::ostringstream out;
  out << "time,node" << coordinate_header(traj.dim()) << '\n';
  for (double t : times) {
    for (NodeId i = 0; i < traj.num_nodes(); ++i) {
      const auto z = interpolate(traj, grid, i, t);
      out << format_double(t) << ',' << labels[i];
      for (double v : z) out << ',' << format_double(v);
      out << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

void write_trace(const std::vector<TracePoint>& trace, const std::string& path) {
  std::ostringstream out;
  out << "iteration,objective\n";
  for (const auto& p : trace) out << p.iteration << ',' << format_double(p.objective) << '\n';
  write_file_atomic(path, out.str());
}

void write_memberships(const generators::BlockSchedule& schedule, const std::string& path) {
  std::ostringstream out;
  out << "segment_start,segment_end,node,cluster\n";
  for (std::size_t s = 0; s < schedule.num_segments(); ++s) {
    for (NodeId i = 0; i < schedule.num_nodes; ++i) {
      out << format_double(schedule.segment_bounds[s]) << ','
          << format_double(schedule.segment_bounds[s + 1]) << ',' << i << ','
          << schedule.memberships[s][i] << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

std::vector<double> parse_time_grid(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    double start = 0.0, end = 0.0, count = 0.0;
    if (parts.size() != 3 || !parse_number(parts[0], start) || !parse_number(parts[1], end) ||
        !parse_number(parts[2], count) || count < 2.0 || count != std::floor(count) ||
        !(end > start)) {
      throw ParseError("grid spec '" + spec + "' is not start:end:count with count >= 2", 0);
    }
    const auto k = static_cast<std::size_t>(count);
    std::vector<double> out(k);
    const double step = (end - start) / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < k; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = end;
    return out;
  }
  std::vector<double> out;
  for (const auto& field : split(s, ',')) {
    double v = 0.0;
    if (!parse_number(field, v)) throw ParseError("invalid time '" + field + "' in grid", 0);
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty time grid", 0);
  return out;
}

}  // namespace clpm::io
