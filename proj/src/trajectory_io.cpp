#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "vskte/adaptive_sim.hpp"
#include "vskte/errors.hpp"

namespace vskte {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const nlohmann::json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_jsonl(std::ostream& out, const Trajectory& traj) {
  if (traj.snapshots.size() != traj.rounds.size())
    fail(ErrorKind::input, "trajectory is missing policy snapshots");
  nlohmann::json meta = {{"policy", traj.meta.policy}, {"seed", traj.meta.seed}, {"env", traj.meta.env}};
  out << nlohmann::json{{"meta", meta}}.dump() << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const LoggedRound& r = traj.rounds[i];
    const PolicySnapshot& s = traj.snapshots[i];
    nlohmann::json rec = {{"t", r.t},
                          {"x", to_std(r.x)},
                          {"a", r.a},
                          {"y", to_std(r.y)},
                          {"prop", r.logged_propensity},
                          {"theta0", to_std(s.theta0)},
                          {"theta1", to_std(s.theta1)},
                          {"eps", s.epsilon}};
    out << rec.dump() << '\n';
  }
}

Trajectory read_jsonl(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "trajectory line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      if (j.contains("meta")) {
        const auto& m = j.at("meta");
        traj.meta.policy = m.value("policy", "");
        traj.meta.seed = m.value("seed", std::uint64_t{0});
        traj.meta.env = m.value("env", nlohmann::json::object());
        continue;
      }
      LoggedRound r;
      PolicySnapshot s;
      r.t = j.at("t").get<std::size_t>();
      r.x = to_vector(j.at("x"));
      r.a = j.at("a").get<int>();
      r.y = to_vector(j.at("y"));
      r.logged_propensity = j.at("prop").get<double>();
      s.t = r.t;
      s.theta0 = to_vector(j.at("theta0"));
      s.theta1 = to_vector(j.at("theta1"));
      s.epsilon = j.at("eps").get<double>();
      if (r.a != 0 && r.a != 1) fail(ErrorKind::parse, where + "action must be 0 or 1");
      if (!(r.logged_propensity > 0.0 && r.logged_propensity < 1.0))
        fail(ErrorKind::parse, where + "prop must lie in (0, 1)");
      if (!traj.rounds.empty() && r.t <= traj.rounds.back().t)
        fail(ErrorKind::parse, where + "rounds must be strictly ascending in t");
      if (!traj.rounds.empty() &&
          (r.x.size() != traj.rounds.front().x.size() || r.y.size() != traj.rounds.front().y.size()))
        fail(ErrorKind::parse, where + "context or outcome dimension changed");
      if (s.theta0.size() != r.x.size() + 1 || s.theta1.size() != r.x.size() + 1)
        fail(ErrorKind::parse, where + "theta length must be len(x) + 1");
      double p1 = s.treated_propensity(std::span<const double>(r.x.data(), r.x.size()));
      double expected = r.a == 1 ? p1 : 1.0 - p1;
      if (std::abs(expected - r.logged_propensity) > 1e-12)
        fail(ErrorKind::parse, where + "prop disagrees with the snapshot propensity");
      traj.rounds.push_back(std::move(r));
      traj.snapshots.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse, where + e.what());
    }
  }
  return traj;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write trajectory '" + path + "'");
  write_jsonl(out, traj);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open trajectory '" + path + "'");
  return read_jsonl(in);
}

}  // namespace vskte
