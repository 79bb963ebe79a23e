#include "ardpg/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ardpg {

namespace {

constexpr const char* kMagic = "ardpg-checkpoint";
constexpr const char* kVersion = "v1";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  std::string magic, version, file_kind;
  in >> magic >> version >> file_kind;
  if (magic != kMagic || version != kVersion || file_kind != kind)
    throw std::runtime_error("checkpoint: bad header in " + path + " (expected " + kind + ")");
  return in;
}

void write_vec(std::ofstream& out, const std::string& name, const Vec& v) {
  out << name << " " << v.size();
  for (int i = 0; i < v.size(); ++i) out << " " << v[i];
  out << "\n";
}

Vec read_vec(std::ifstream& in, const std::string& expected) {
  std::string name;
  long size = 0;
  in >> name >> size;
  if (name != expected || size < 0 || !in)
    throw std::runtime_error("checkpoint: expected field " + expected);
  Vec v(size);
  for (long i = 0; i < size; ++i) in >> v[i];
  return v;
}

double read_scalar(std::ifstream& in, const std::string& expected) {
  std::string name;
  double v = 0.0;
  in >> name >> v;
  if (name != expected || !in)
    throw std::runtime_error("checkpoint: expected field " + expected);
  return v;
}

void write_mlp(std::ofstream& out, const std::string& name, const Mlp& net) {
  out << name << "_widths " << net.n_layers() + 1;
  out << " " << net.in_dim();
  for (int l = 0; l < net.n_layers(); ++l) out << " " << net.W[l].rows();
  out << "\n";
  write_vec(out, name + "_params", net.flatten());
}

Mlp read_mlp(std::ifstream& in, const std::string& name, Act act) {
  std::string field;
  long count = 0;
  in >> field >> count;
  if (field != name + "_widths" || count < 2)
    throw std::runtime_error("checkpoint: expected field " + name + "_widths");
  std::vector<int> widths(count);
  for (long i = 0; i < count; ++i) in >> widths[i];
  CounterRng dummy(0);
  Mlp net(widths, act, dummy);
  net.unflatten(read_vec(in, name + "_params"));
  return net;
}

}  // namespace

void save_critic(const CriticState& cs, std::uint64_t step, const std::string& path) {
  auto out = open_out(path);
  out << kMagic << " " << kVersion << " linear-critic\n";
  out << "step " << step << "\n";
  out << "double_head " << (cs.double_head ? 1 : 0) << "\n";
  out << "eta " << cs.eta << "\n";
  out << "c_w " << cs.ball.radius << "\n";
  out << "rho " << cs.rho << "\n";
  out << "rho_target " << cs.rho_target << "\n";
  write_vec(out, "w1", cs.w1);
  write_vec(out, "w2", cs.w2);
  write_vec(out, "w1_target", cs.w1_target);
  write_vec(out, "w2_target", cs.w2_target);
}

CriticState load_critic(const std::string& path, std::uint64_t* step) {
  auto in = open_in(path, "linear-critic");
  const auto step_value = static_cast<std::uint64_t>(read_scalar(in, "step"));
  if (step) *step = step_value;
  CriticState cs;
  cs.double_head = read_scalar(in, "double_head") != 0.0;
  cs.eta = read_scalar(in, "eta");
  cs.ball.radius = read_scalar(in, "c_w");
  cs.rho = read_scalar(in, "rho");
  cs.rho_target = read_scalar(in, "rho_target");
  cs.w1 = read_vec(in, "w1");
  cs.w2 = read_vec(in, "w2");
  cs.w1_target = read_vec(in, "w1_target");
  cs.w2_target = read_vec(in, "w2_target");
  return cs;
}

void save_agent(const AroDdpgAgent& agent, const std::string& path) {
  auto out = open_out(path);
  out << kMagic << " " << kVersion << " neural-agent\n";
  out << "activation " << (agent.actor.act == Act::relu ? "relu" : "gelu") << "\n";
  out << "step " << agent.t << "\n";
  out << "rho " << agent.rho << "\n";
  out << "rho_target " << agent.rho_target << "\n";
  write_vec(out, "action_scale", agent.action_scale);
  write_mlp(out, "actor", agent.actor);
  write_mlp(out, "actor_target", agent.actor_target);
  write_mlp(out, "q1", agent.q1);
  write_mlp(out, "q2", agent.q2);
  write_mlp(out, "q1_target", agent.q1_target);
  write_mlp(out, "q2_target", agent.q2_target);
}

AroDdpgAgent load_agent(const std::string& path) {
  auto in = open_in(path, "neural-agent");
  std::string field, act_name;
  in >> field >> act_name;
  if (field != "activation") throw std::runtime_error("checkpoint: expected field activation");
  const Act act = act_name == "gelu" ? Act::gelu : Act::relu;
  AroDdpgAgent agent;
  agent.t = static_cast<std::uint64_t>(read_scalar(in, "step"));
  agent.rho = read_scalar(in, "rho");
  agent.rho_target = read_scalar(in, "rho_target");
  agent.action_scale = read_vec(in, "action_scale");
  agent.actor = read_mlp(in, "actor", act);
  agent.actor_target = read_mlp(in, "actor_target", act);
  agent.q1 = read_mlp(in, "q1", act);
  agent.q2 = read_mlp(in, "q2", act);
  agent.q1_target = read_mlp(in, "q1_target", act);
  agent.q2_target = read_mlp(in, "q2_target", act);
  agent.cfg.activation = act;
  return agent;
}

}  // namespace ardpg
