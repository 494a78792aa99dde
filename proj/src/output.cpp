#include "dmbohm/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dmbohm {

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json histogram_json(const Histogram& h) {
  return json{{"lo", h.lo}, {"hi", h.hi}, {"bins", h.bins()},
              {"mass", std::vector<double>(h.mass.data(), h.mass.data() + h.mass.size())}};
}

json operator_json(const finite::DensityOperator<double>& rho) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < rho.dim(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Index j = 0; j < rho.dim(); ++j) {
      rr.push_back(rho.matrix()(i, j).real());
      ii.push_back(rho.matrix()(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return json{{"dim", rho.dim()}, {"real", re}, {"imag", im}, {"entropy", finite::von_neumann_entropy(rho)}};
}

double pixel(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

void write_trajectories_csv(std::ostream& out, const TrajectoryEnsemble& e) {
  const bool planar = !e.trajectories.empty() && e.trajectories.front().dims == 2;
  out << (planar ? "traj_id,t,x,y\n" : "traj_id,t,x\n");
  for (const Trajectory& t : e.trajectories) {
    for (std::size_t r = 0; r < t.records(); ++r) {
      out << t.id << ',' << format_number(e.times[r]) << ',' << format_number(t.coordinate(r, 0));
      if (planar) out << ',' << format_number(t.coordinate(r, 1));
      out << '\n';
    }
  }
}

void write_trajectories_jsonl(std::ostream& out, const TrajectoryEnsemble& e) {
  for (const Trajectory& t : e.trajectories) {
    json line{{"traj_id", t.id}, {"status", std::string(to_string(t.status))}};
    line["flag_time"] = t.ok() ? json(nullptr) : json(t.flag_time);
    line["t"] = e.times;
    for (int d = 0; d < t.dims; ++d) {
      std::vector<double> c(t.records());
      for (std::size_t r = 0; r < t.records(); ++r) c[r] = t.coordinate(r, d);
      line[d == 0 ? "x" : "y"] = c;
    }
    std::vector<int> branch(t.branch.begin(), t.branch.end());
    line["branch"] = branch;
    out << line.dump() << '\n';
  }
}

void write_field_csv(std::ostream& out, const GuidanceField& g) {
  const Grid& grid = g.grid();
  const bool planar = grid.dims() == 2;
  out << (planar ? "x,y,P,Jx,Jy\n" : "x,P,Jx\n");
  for (Index f = 0; f < grid.size(); ++f) {
    const Point p = grid.node(f);
    out << format_number(p[0]);
    if (planar) out << ',' << format_number(p[1]);
    out << ',' << format_number(g.density[f]);
    for (int d = 0; d < grid.dims(); ++d) out << ',' << format_number(g.current.component(d)[f]);
    out << '\n';
  }
}

std::string summary_json(const ScenarioResult& r, const RunConfig& c) {
  json config = json::object();
  for (const auto& [key, value] : config_entries(c)) {
    if (key != "output.dir") config[key] = value;
  }
  json equivariance = json::array();
  for (const auto& p : r.equivariance) equivariance.push_back(json{{"t", p.time}, {"tv", p.tv}});

  json out{{"schema", "dmbohm.summary/1"},
           {"scenario", std::string(to_string(r.config.variant))},
           {"seed", r.config.seed},
           {"n", r.config.n},
           {"version", DMBOHM_VERSION},
           {"config_digest", config_digest(c)},
           {"t_meet", r.config.t_meet()},
           {"t_final", r.config.t_final},
           {"crossing_fraction", number_or_null(r.crossing_fraction)},
           {"visibility", number_or_null(r.visibility)},
           {"equivariance_tv", equivariance},
           {"max_continuity_residual", number_or_null(r.max_continuity_residual)},
           {"max_edge_density", number_or_null(r.max_edge_density)},
           {"flags",
            json{{"node_entry", r.node_entries}, {"out_of_domain", r.out_of_domain}, {"boundary_leak", r.boundary_leak()}}},
           {"screen", json{{"trajectories", histogram_json(r.screen)}, {"density", histogram_json(r.screen_density)}}},
           {"nominal_operator", operator_json(r.nominal)},
           {"config", config}};
  return out.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  std::vector<std::string> artifacts;
  for (const auto& a : m.artifacts) artifacts.push_back(a.string());
  json out{{"command", m.command},
           {"config_digest", m.config_digest},
           {"seed", m.seed},
           {"artifacts", artifacts},
           {"version", m.version},
           {"wall_clock_seconds", m.wall_clock_seconds},
           {"flags", m.flags}};
  return out.dump(2) + "\n";
}

std::string emit_svg(const TrajectoryEnsemble& e, const SvgStyle& style) {
  if (e.trajectories.empty() || e.times.empty()) throw Error(ErrorCode::EmptyEnsemble, "nothing to plot");
  const int axis = style.coordinate;
  double lo = style.axis;
  double hi = style.axis;
  for (const Trajectory& t : e.trajectories) {
    for (std::size_t r = 0; r < t.records(); ++r) {
      lo = std::min(lo, t.coordinate(r, axis));
      hi = std::max(hi, t.coordinate(r, axis));
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double t0 = e.times.front();
  const double t_span = e.times.back() > t0 ? e.times.back() - t0 : 1.0;
  const double margin = 40.0;
  const double w = style.width - 2.0 * margin;
  const double h = style.height - 2.0 * margin;
  auto px = [&](double t) { return format_number(pixel(margin + (t - t0) / t_span * w)); };
  auto py = [&](double x) { return format_number(pixel(style.height - margin - (x - lo) / (hi - lo) * h)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g fill=\"none\" stroke-width=\"0.6\" stroke-opacity=\"0.6\">\n";
  for (const Trajectory& t : e.trajectories) {
    const int b = t.branch.empty() ? -1 : t.branch.front();
    const char* colour = b == 0 ? "#1f77b4" : b == 1 ? "#d62728" : b > 1 ? "#2ca02c" : "#555555";
    svg << "<polyline stroke=\"" << colour << '"';
    if (!t.ok()) svg << " stroke-dasharray=\"2 2\"";
    svg << " points=\"";
    for (std::size_t r = 0; r < t.records(); ++r) {
      if (r) svg << ' ';
      svg << px(e.times[r]) << ',' << py(t.coordinate(r, axis));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<line x1=\"" << px(t0) << "\" y1=\"" << py(style.axis) << "\" x2=\"" << px(t0 + t_span) << "\" y2=\""
      << py(style.axis) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << style.height - 12 << "\" font-size=\"12\">t: " << format_number(t0)
      << " to " << format_number(t0 + t_span) << "</text>\n";
  svg << "<text x=\"4\" y=\"" << margin - 12 << "\" font-size=\"12\">" << (axis == 0 ? 'x' : 'y') << ": "
      << format_number(lo) << " to " << format_number(hi) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + path.string());
  out << text;
}

}  // namespace dmbohm
