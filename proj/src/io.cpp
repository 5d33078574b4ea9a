#include "squeeze_forge/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "squeeze_forge/errors.hpp"

namespace sqf {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Segment segment_from_json(const json& j, double freq_scale, double time_scale) {
  if (!j.is_object()) throw ConfigError("segment must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("segment needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  Segment seg;
  seg.duration = number(j, "duration") * time_scale;
  if (kind == "constant") {
    seg.shape = Constant{number(j, "omega") * freq_scale};
  } else if (kind == "ramp") {
    seg.shape = LinearRamp{number(j, "omega_start") * freq_scale, number(j, "omega_end") * freq_scale};
  } else if (kind == "sinusoid") {
    seg.shape = Sinusoid{number(j, "omega_base") * freq_scale, number(j, "amplitude") * freq_scale,
                         number(j, "drive_frequency") * freq_scale, number_or(j, "phase", 0.0)};
  } else if (kind == "sampled") {
    if (j.contains("interpolation") && j.at("interpolation") != "linear") {
      throw ConfigError("sampled segments support only linear interpolation");
    }
    if (!j.contains("points") || !j.at("points").is_array()) throw ConfigError("sampled segment needs 'points'");
    Sampled s;
    for (const auto& pt : j.at("points")) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw ConfigError("sampled points must be [t, omega] pairs");
      }
      s.times.push_back(pt[0].get<double>() * time_scale);
      s.omegas.push_back(pt[1].get<double>() * freq_scale);
    }
    seg.shape = std::move(s);
  } else {
    throw ConfigError("unknown segment kind '" + kind + "'");
  }
  return seg;
}

json segment_to_json(const Segment& seg) {
  json j;
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Constant>) {
          j["kind"] = "constant";
          j["omega"] = shape.omega;
        } else if constexpr (std::is_same_v<T, LinearRamp>) {
          j["kind"] = "ramp";
          j["omega_start"] = shape.omega_start;
          j["omega_end"] = shape.omega_end;
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          j["kind"] = "sinusoid";
          j["omega_base"] = shape.base;
          j["amplitude"] = shape.amplitude;
          j["drive_frequency"] = shape.drive_frequency;
          j["phase"] = shape.phase;
        } else {
          j["kind"] = "sampled";
          j["interpolation"] = "linear";
          json pts = json::array();
          for (std::size_t i = 0; i < shape.times.size(); ++i) pts.push_back({shape.times[i], shape.omegas[i]});
          j["points"] = std::move(pts);
        }
      },
      seg.shape);
  j["duration"] = seg.duration;
  return j;
}

template <typename... Ts>
void csv_row(std::string& out, Ts... values) {
  bool first = true;
  ((out += (first ? "" : ","), out += format_double(values), first = false), ...);
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

FrequencyProtocol protocol_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("protocol must be a JSON object");
  if (!j.contains("segments") || !j.at("segments").is_array() || j.at("segments").empty()) {
    throw ConfigError("protocol needs a non-empty 'segments' array");
  }
  double freq_scale = 1.0;
  double time_scale = 1.0;
  const std::string units = j.value("units", std::string("omega0"));
  if (units == "absolute") {
    const double w0 = number(j, "omega0");
    if (!(w0 > 0.0)) throw ConfigError("absolute units need a positive omega0");
    freq_scale = 1.0 / w0;
    time_scale = w0;
  } else if (units != "omega0") {
    throw ConfigError("unknown units '" + units + "' (expected omega0 or absolute)");
  }

  std::vector<Segment> segs;
  for (const auto& s : j.at("segments")) segs.push_back(segment_from_json(s, freq_scale, time_scale));
  const double w_start = segs.front().omega_at(0.0);
  const double w_end = segs.back().omega_at(segs.back().duration);
  const double omega0 = j.contains("omega0") ? number(j, "omega0") * freq_scale : w_start;
  const double omega1 = j.contains("omega1") ? number(j, "omega1") * freq_scale : w_end;
  std::optional<double> tau;
  if (j.contains("tau")) tau = number(j, "tau") * time_scale;
  return FrequencyProtocol(std::move(segs), omega0, omega1, tau);
}

json protocol_to_json(const FrequencyProtocol& protocol) {
  json j;
  j["omega0"] = protocol.omega0();
  j["omega1"] = protocol.omega1();
  j["tau"] = protocol.duration();
  json segs = json::array();
  for (const auto& s : protocol.segments()) segs.push_back(segment_to_json(s));
  j["segments"] = std::move(segs);
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << contents;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string trajectory_csv(const FrequencyProtocol& protocol, std::span<const FundamentalState> states) {
  std::string out = "t,omega,X,dX,Y,dY,q2,p2,qp\n";
  const double w0 = protocol.omega_at(0.0);
  for (const auto& s : states) {
    const auto c = covariance(s, w0);
    csv_row(out, s.t, protocol.omega_at(s.t), s.x, s.dx, s.y, s.dy, c.q2, c.p2, c.qp);
  }
  return out;
}

std::string thermo_csv(std::span<const ThermoRecord> records) {
  std::string out = "t,omega,qstar,energy,total_work,delta_F,irr_work\n";
  for (const auto& r : records) csv_row(out, r.t, r.omega, r.qstar, r.energy, r.total_work, r.delta_F, r.irr_work);
  return out;
}

std::string squeezing_csv(const FrequencyProtocol& protocol, std::span<const FundamentalState> states) {
  std::string out = "t,omega,r,theta,qstar,irr_work\n";
  const double w0 = protocol.omega_at(0.0);
  for (const auto& s : states) {
    const double w = protocol.omega_at(s.t);
    const auto c = covariance(s, w0);
    const auto d = decompose(c, w);
    const double q = qstar_from_cov(c, w);
    csv_row(out, s.t, w, d.r, d.theta, q, w * (q - 1.0) / 2.0);
  }
  return out;
}

std::string populations_csv(const FockDistribution& dist) {
  std::string out = "n,P\n";
  for (std::size_t n = 0; n < dist.populations.size(); ++n) {
    out += std::to_string(n);
    out += ',';
    out += format_double(dist.populations[n]);
    out += '\n';
  }
  return out;
}

FockDistribution populations_from_csv(const std::string& text, double omega) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,P", 0) != 0) throw ConfigError("populations CSV needs header n,P");
  FockDistribution dist;
  dist.omega = omega;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed populations row: " + line);
    std::size_t n = 0;
    double p = 0.0;
    try {
      n = std::stoul(line.substr(0, comma));
      p = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("malformed populations row: " + line);
    }
    if (p < 0.0) throw ConfigError("negative population in row: " + line);
    if (n >= dist.populations.size()) dist.populations.resize(n + 1, 0.0);
    dist.populations[n] = p;
  }
  return dist;
}

std::string convergence_csv(std::span<const IterationRecord> history) {
  std::string out = "iteration,objective,residual\n";
  for (const auto& h : history) {
    out += std::to_string(h.iteration);
    out += ',';
    out += format_double(h.objective);
    out += ',';
    out += format_double(h.residual);
    out += '\n';
  }
  return out;
}

json estimate_to_json(const SqueezingEstimate& est) {
  return {{"energy", est.energy}, {"qstar", est.qstar}, {"r", est.r}, {"beta", est.beta}, {"clamped", est.clamped}};
}

json optimization_to_json(const OptimizationResult& result, const ControlProblem& problem) {
  return {{"switch_times", result.switch_times},
          {"omega_low", problem.omega_low},
          {"omega_high", problem.omega_high},
          {"horizon", result.horizon},
          {"qstar", result.achieved_qstar},
          {"r", result.achieved_r},
          {"converged", result.converged},
          {"first_order_residual", result.first_order_residual},
          {"iterations", result.iterations},
          {"init", result.start}};
}

}  // namespace sqf
