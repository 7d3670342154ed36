#include "zsim/trajectory_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace zsim {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> trajectory_columns(Form form) {
  std::vector<std::string> c = {"tau", "t", "x1", "x2", "x3", "u0", "u1", "u2", "u3"};
  switch (form) {
    case Form::Position:
      c.insert(c.end(), {"y0", "y1", "y2", "y3"});
      break;
    case Form::SpinTensor:
      c.insert(c.end(), {"S01", "S02", "S03", "S12", "S13", "S23"});
      break;
    case Form::Spinor:
      for (int i = 1; i <= 4; ++i) {
        c.push_back("phi" + std::to_string(i) + "_re");
        c.push_back("phi" + std::to_string(i) + "_im");
      }
      break;
  }
  c.insert(c.end(), {"pi0", "pi1", "pi2", "pi3", "C1", "C2", "C3", "G"});
  return c;
}

std::vector<double> trajectory_row(const Sample& s) {
  const Kinematics k = kinematics(s.state);
  std::vector<double> r = {s.tau, k.x[0], k.x[1], k.x[2], k.x[3], k.u[0], k.u[1], k.u[2], k.u[3]};
  switch (form_of(s.state)) {
    case Form::Position: {
      const auto& p = std::get<PositionState>(s.state);
      for (int i = 0; i < 4; ++i) r.push_back(p.y[i]);
      break;
    }
    case Form::SpinTensor: {
      const Tensor4& m = std::get<SpinTensorState>(s.state).spin.matrix();
      r.insert(r.end(), {m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)});
      break;
    }
    case Form::Spinor: {
      const auto& p = std::get<SpinorState>(s.state);
      for (int i = 0; i < 4; ++i) {
        r.push_back(p.phi[i].real());
        r.push_back(p.phi[i].imag());
      }
      break;
    }
  }
  r.insert(r.end(), {k.pi[0], k.pi[1], k.pi[2], k.pi[3], s.residuals.c1, s.residuals.c2,
                     s.residuals.c3, s.residuals.g});
  return r;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto cols = trajectory_columns(traj.form);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& s : traj.samples) {
    const auto row = trajectory_row(s);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj) {
  const auto cols = trajectory_columns(traj.form);
  for (const auto& s : traj.samples) {
    const auto row = trajectory_row(s);
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = row[i];
    os << j.dump() << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("empty trajectory file");
  std::optional<Form> form;
  for (Form f : {Form::Position, Form::SpinTensor, Form::Spinor}) {
    const auto cols = trajectory_columns(f);
    std::string h;
    for (std::size_t i = 0; i < cols.size(); ++i) h += (i ? "," : "") + cols[i];
    if (h == header) form = f;
  }
  if (!form) throw std::invalid_argument("unrecognised trajectory header");
  const std::size_t ncols = trajectory_columns(*form).size();

  Trajectory traj;
  traj.form = *form;
  std::string line;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      double d = 0.0;
      const auto res = std::from_chars(line.data() + pos, line.data() + comma, d);
      if (res.ec != std::errc() || res.ptr != line.data() + comma)
        throw std::invalid_argument("bad number on trajectory line " + std::to_string(lineno));
      v.push_back(d);
      pos = comma + 1;
    }
    if (v.size() != ncols)
      throw std::invalid_argument("wrong column count on trajectory line " + std::to_string(lineno));
    const FourVector x(v[1], v[2], v[3], v[4]);
    const FourVector u(v[5], v[6], v[7], v[8]);
    const std::size_t p = ncols - 8;
    const FourVector pi(v[p], v[p + 1], v[p + 2], v[p + 3]);
    DynState state;
    switch (*form) {
      case Form::Position:
        state = PositionState{x, u, FourVector(v[9], v[10], v[11], v[12]), pi};
        break;
      case Form::SpinTensor: {
        Tensor4 m = Tensor4::Zero();
        m(0, 1) = v[9];
        m(0, 2) = v[10];
        m(0, 3) = v[11];
        m(1, 2) = v[12];
        m(1, 3) = v[13];
        m(2, 3) = v[14];
        state = SpinTensorState{x, u, SpinTensor::from_matrix(m - m.transpose()), pi};
        break;
      }
      case Form::Spinor: {
        SpinorState s;
        s.x = x;
        s.pi = pi;
        for (int i = 0; i < 4; ++i)
          s.phi[i] = Complex(v[9 + 2 * static_cast<std::size_t>(i)], v[10 + 2 * static_cast<std::size_t>(i)]);
        state = s;
        break;
      }
    }
    traj.samples.push_back({v[0], state, constraint_residuals(state)});
  }
  return traj;
}

}  // namespace zsim
