#include "jshap/model.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jshap {

void ModelHandle::predict_batch(std::span<const std::vector<double>> instances,
                                std::span<double> out) const {
  if (instances.size() != out.size())
    throw std::invalid_argument("predict_batch: output span size mismatch");
  for (std::size_t i = 0; i < instances.size(); ++i) out[i] = predict(instances[i]);
}

Rational ModelHandle::predict_exact(std::span<const Rational>) const {
  throw std::logic_error("model '" + describe() + "' does not support exact evaluation");
}

namespace {

void check_width(std::size_t got, int need, const std::string& who) {
  if (static_cast<int>(got) < need)
    throw std::invalid_argument(who + ": instance has " + std::to_string(got) +
                                " features, needs at least " + std::to_string(need));
}

class BuiltinModel final : public ModelHandle {
 public:
  enum class Op { select, sum, diff, product, constant, linear };

  BuiltinModel(Op op, int i, int j, Rational c, std::vector<Rational> weights)
      : op_(op), i_(i), j_(j), c_(std::move(c)), weights_(std::move(weights)) {
    for (const auto& w : weights_) weights_num_.push_back(w.to_double());
    c_num_ = c_.to_double();
  }

  int n_features() const override {
    switch (op_) {
      case Op::select: return i_ + 1;
      case Op::sum:
      case Op::diff:
      case Op::product: return std::max(i_, j_) + 1;
      case Op::constant: return 0;
      case Op::linear: return static_cast<int>(weights_.size());
    }
    return 0;
  }

  bool parallel_safe() const override { return true; }
  bool exact_capable() const override { return true; }

  std::string describe() const override {
    switch (op_) {
      case Op::select: return "builtin:select:" + std::to_string(i_);
      case Op::sum: return "builtin:sum:" + std::to_string(i_) + "," + std::to_string(j_);
      case Op::diff: return "builtin:diff:" + std::to_string(i_) + "," + std::to_string(j_);
      case Op::product:
        return "builtin:product:" + std::to_string(i_) + "," + std::to_string(j_);
      case Op::constant: return "builtin:constant:" + c_.str();
      case Op::linear: return "builtin:linear[" + std::to_string(weights_.size()) + "]";
    }
    return "builtin:?";
  }

  double predict(std::span<const double> x) const override {
    check_width(x.size(), n_features(), describe());
    switch (op_) {
      case Op::select: return x[static_cast<std::size_t>(i_)];
      case Op::sum: return x[static_cast<std::size_t>(i_)] + x[static_cast<std::size_t>(j_)];
      case Op::diff: return x[static_cast<std::size_t>(i_)] - x[static_cast<std::size_t>(j_)];
      case Op::product:
        return x[static_cast<std::size_t>(i_)] * x[static_cast<std::size_t>(j_)];
      case Op::constant: return c_num_;
      case Op::linear: {
        double acc = 0.0;
        for (std::size_t f = 0; f < weights_num_.size(); ++f) acc += weights_num_[f] * x[f];
        return acc;
      }
    }
    return 0.0;
  }

  Rational predict_exact(std::span<const Rational> x) const override {
    check_width(x.size(), n_features(), describe());
    switch (op_) {
      case Op::select: return x[static_cast<std::size_t>(i_)];
      case Op::sum: return x[static_cast<std::size_t>(i_)] + x[static_cast<std::size_t>(j_)];
      case Op::diff: return x[static_cast<std::size_t>(i_)] - x[static_cast<std::size_t>(j_)];
      case Op::product:
        return x[static_cast<std::size_t>(i_)] * x[static_cast<std::size_t>(j_)];
      case Op::constant: return c_;
      case Op::linear: {
        Rational acc(0);
        for (std::size_t f = 0; f < weights_.size(); ++f) acc += weights_[f] * x[f];
        return acc;
      }
    }
    return Rational(0);
  }

 private:
  Op op_;
  int i_ = 0;
  int j_ = 0;
  Rational c_;
  double c_num_ = 0.0;
  std::vector<Rational> weights_;
  std::vector<double> weights_num_;
};

}  // namespace

namespace models {
ModelPtr select(int i) {
  if (i < 0) throw std::invalid_argument("select: negative feature index");
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::select, i, 0, Rational(0),
                                        std::vector<Rational>{});
}
ModelPtr sum(int i, int j) {
  if (i < 0 || j < 0) throw std::invalid_argument("sum: negative feature index");
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::sum, i, j, Rational(0),
                                        std::vector<Rational>{});
}
ModelPtr diff(int i, int j) {
  if (i < 0 || j < 0) throw std::invalid_argument("diff: negative feature index");
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::diff, i, j, Rational(0),
                                        std::vector<Rational>{});
}
ModelPtr product(int i, int j) {
  if (i < 0 || j < 0) throw std::invalid_argument("product: negative feature index");
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::product, i, j, Rational(0),
                                        std::vector<Rational>{});
}
ModelPtr constant(const Rational& c) {
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::constant, 0, 0, c,
                                        std::vector<Rational>{});
}
ModelPtr linear(std::vector<Rational> weights) {
  if (weights.empty()) throw std::invalid_argument("linear: needs at least one weight");
  return std::make_shared<BuiltinModel>(BuiltinModel::Op::linear, 0, 0, Rational(0),
                                        std::move(weights));
}
}  // namespace models

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

Rational parse_number_token(const std::string& tok) {
  if (tok.find('/') != std::string::npos || tok.find('.') == std::string::npos)
    return Rational(tok);
  return Rational::from_double_exact(std::stod(tok));
}

}  // namespace

ModelPtr builtin_model(const std::string& expr, const std::vector<std::string>& params) {
  auto want = [&](std::size_t m) {
    if (params.size() != m)
      throw std::invalid_argument("builtin model '" + expr + "': expected " +
                                  std::to_string(m) + " parameter(s), got " +
                                  std::to_string(params.size()));
  };
  if (expr == "select") {
    want(1);
    return models::select(std::stoi(params[0]));
  }
  if (expr == "sum") {
    want(2);
    return models::sum(std::stoi(params[0]), std::stoi(params[1]));
  }
  if (expr == "diff") {
    want(2);
    return models::diff(std::stoi(params[0]), std::stoi(params[1]));
  }
  if (expr == "product") {
    want(2);
    return models::product(std::stoi(params[0]), std::stoi(params[1]));
  }
  if (expr == "constant") {
    want(1);
    return models::constant(parse_number_token(params[0]));
  }
  if (expr == "linear") {
    std::vector<Rational> w;
    for (const auto& p : params) w.push_back(parse_number_token(p));
    return models::linear(std::move(w));
  }
  throw std::invalid_argument("unknown builtin model '" + expr + "'");
}

namespace {

class TableModel final : public ModelHandle {
 public:
  explicit TableModel(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("table model: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("table model '" + path + "': missing header");
    const auto header = split(line, ',');
    if (header.size() < 2)
      throw std::runtime_error("table model '" + path +
                               "': need at least one feature column and a prediction column");
    n_features_ = static_cast<int>(header.size()) - 1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != header.size())
        throw std::runtime_error("table model '" + path + "': row " + std::to_string(lineno) +
                                 " has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()));
      std::vector<double> key(static_cast<std::size_t>(n_features_));
      for (int f = 0; f < n_features_; ++f) key[static_cast<std::size_t>(f)] =
          std::stod(cells[static_cast<std::size_t>(f)]);
      const double pred = std::stod(cells.back());
      auto [it, inserted] = rows_.emplace(std::move(key), pred);
      if (!inserted && it->second != pred)
        throw std::runtime_error("table model '" + path + "': row " + std::to_string(lineno) +
                                 " conflicts with an earlier prediction for the same instance");
    }
  }

  int n_features() const override { return n_features_; }
  bool parallel_safe() const override { return true; }
  std::string describe() const override { return "table:" + path_; }

  double predict(std::span<const double> x) const override {
    check_width(x.size(), n_features_, describe());
    const std::vector<double> key(x.begin(), x.begin() + n_features_);
    auto it = rows_.find(key);
    if (it == rows_.end()) {
      std::string inst;
      for (double v : key) {
        if (!inst.empty()) inst += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        inst += buf;
      }
      throw std::runtime_error("table model '" + path_ + "': instance [" + inst +
                               "] not present in the table");
    }
    return it->second;
  }

 private:
  std::string path_;
  int n_features_ = 0;
  std::map<std::vector<double>, double> rows_;
};

// External process speaking one JSON object per line on stdin/stdout.
class ExternalModel final : public ModelHandle {
 public:
  ExternalModel(const std::string& command, std::chrono::milliseconds timeout)
      : command_(command), timeout_(timeout) {
    spawn();
  }

  ~ExternalModel() override { shutdown(); }

  int n_features() const override { return 0; }
  bool parallel_safe() const override { return false; }
  std::string describe() const override { return "exec:" + command_; }

  double predict(std::span<const double> x) const override {
    std::lock_guard<std::mutex> lock(io_mutex_);
    const std::uint64_t id = next_id_++;
    send_request(id, x);
    return await_response(id);
  }

  void predict_batch(std::span<const std::vector<double>> instances,
                     std::span<double> out) const override {
    if (instances.size() != out.size())
      throw std::invalid_argument("predict_batch: output span size mismatch");
    std::lock_guard<std::mutex> lock(io_mutex_);
    constexpr std::size_t kWindow = 64;
    std::size_t sent = 0, done = 0;
    std::vector<std::uint64_t> ids(instances.size());
    while (done < instances.size()) {
      while (sent < instances.size() && sent - done < kWindow) {
        ids[sent] = next_id_++;
        send_request(ids[sent], instances[sent]);
        ++sent;
      }
      out[done] = await_response(ids[done]);
      ++done;
    }
  }

 private:
  void spawn() {
    int to_child[2], from_child[2], exec_err[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0 || pipe(exec_err) != 0)
      throw std::runtime_error("external model: pipe() failed: " +
                               std::string(std::strerror(errno)));
    fcntl(exec_err[1], F_SETFD, FD_CLOEXEC);
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("external model: fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      close(exec_err[0]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      const int err = errno;
      ssize_t ignored = write(exec_err[1], &err, sizeof err);
      (void)ignored;
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    close(exec_err[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    // Handshake: exec failure reports errno through the close-on-exec pipe.
    int err = 0;
    const ssize_t got = read(exec_err[0], &err, sizeof err);
    close(exec_err[0]);
    if (got > 0) {
      shutdown();
      throw std::runtime_error("external model: cannot spawn '" + command_ +
                               "': " + std::strerror(err));
    }
  }

  void shutdown() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    in_fd_ = out_fd_ = -1;
    if (pid_ > 0) {
      int status = 0;
      for (int tries = 0; tries < 50; ++tries) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        usleep(10000);
      }
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  void send_request(std::uint64_t id, std::span<const double> x) const {
    nlohmann::json req;
    req["id"] = id;
    req["instance"] = std::vector<double>(x.begin(), x.end());
    std::string line = req.dump();
    line += '\n';
    std::size_t off = 0;
    while (off < line.size()) {
      const ssize_t w = write(in_fd_, line.data() + off, line.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("external model '" + command_ +
                                 "': write failed (process died?): " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(w);
    }
  }

  double await_response(std::uint64_t id) const {
    auto it = pending_.find(id);
    while (it == pending_.end()) {
      const std::string line = read_line();
      nlohmann::json rsp;
      try {
        rsp = nlohmann::json::parse(line);
      } catch (const std::exception& e) {
        throw std::runtime_error("external model '" + command_ + "': malformed line '" + line +
                                 "': " + e.what());
      }
      if (!rsp.is_object() || !rsp.contains("id") || !rsp.contains("prediction"))
        throw std::runtime_error("external model '" + command_ +
                                 "': response missing id/prediction: '" + line + "'");
      const std::uint64_t got = rsp["id"].get<std::uint64_t>();
      if (got >= next_id_ || pending_.count(got) || done_ids_.count(got))
        throw std::runtime_error("external model '" + command_ + "': response with unknown id " +
                                 std::to_string(got) + ": '" + line + "'");
      pending_[got] = rsp["prediction"].get<double>();
      it = pending_.find(id);
    }
    const double v = it->second;
    pending_.erase(it);
    done_ids_.insert(id);
    return v;
  }

  std::string read_line() const {
    std::string line;
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        last_line_ = line;
        return line;
      }
      pollfd pfd{out_fd_, POLLIN, 0};
      const int pr = poll(&pfd, 1, static_cast<int>(timeout_.count()));
      if (pr == 0)
        throw std::runtime_error("external model '" + command_ + "': timeout after " +
                                 std::to_string(timeout_.count()) + " ms (last line: '" +
                                 last_line_ + "')");
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("external model '" + command_ +
                                 "': poll failed: " + std::strerror(errno));
      }
      char chunk[4096];
      const ssize_t r = read(out_fd_, chunk, sizeof chunk);
      if (r == 0)
        throw std::runtime_error("external model '" + command_ +
                                 "': process closed its output (last line: '" + last_line_ +
                                 "')");
      if (r < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("external model '" + command_ +
                                 "': read failed: " + std::strerror(errno));
      }
      buffer_.append(chunk, static_cast<std::size_t>(r));
    }
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  mutable std::mutex io_mutex_;
  mutable std::uint64_t next_id_ = 0;
  mutable std::map<std::uint64_t, double> pending_;
  mutable std::set<std::uint64_t> done_ids_;
  mutable std::string buffer_;
  mutable std::string last_line_;
};

}  // namespace

ModelPtr table_model(const std::string& csv_path) { return std::make_shared<TableModel>(csv_path); }

ModelPtr external_model(const std::string& command, std::chrono::milliseconds timeout) {
  return std::make_shared<ExternalModel>(command, timeout);
}

ModelPtr parse_model_spec(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) {
    const auto rest = spec.substr(8);
    const auto colon = rest.find(':');
    const std::string expr = colon == std::string::npos ? rest : rest.substr(0, colon);
    std::vector<std::string> params;
    if (colon != std::string::npos) params = split(rest.substr(colon + 1), ',');
    return builtin_model(expr, params);
  }
  if (spec.rfind("table:", 0) == 0) return table_model(spec.substr(6));
  if (spec.rfind("exec:", 0) == 0) return external_model(spec.substr(5));
  throw std::invalid_argument("model spec '" + spec +
                              "' must start with builtin:, table:, or exec:");
}

}  // namespace jshap
