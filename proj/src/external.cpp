#include "lejapce/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <regex>

#include <json.hpp>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

// Requests in flight per child. Small enough that neither pipe can fill.
constexpr std::size_t kWindow = 32;

struct Child {
  pid_t pid = -1;
  int in = -1;   // our end of the child's stdin
  int out = -1;  // our end of the child's stdout
  std::string buffer;
  std::size_t in_flight = 0;
};

std::string describe_status(pid_t pid) {
  int status = 0;
  for (int tries = 0; tries < 50; ++tries) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
      if (WIFSIGNALED(status)) return "was killed by signal " + std::to_string(WTERMSIG(status));
      return "stopped";
    }
    if (r < 0) return "exited";
    usleep(2000);
  }
  return "closed its output";
}

Child spawn(const std::vector<std::string>& command) {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0) throw ModelError(std::string("pipe: ") + std::strerror(errno));
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw ModelError(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> argv;
  for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw ModelError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  Child c;
  c.pid = pid;
  c.in = to_child[1];
  c.out = from_child[0];
  return c;
}

void shutdown(Child& c) {
  if (c.in >= 0) close(c.in);
  if (c.out >= 0) close(c.out);
  if (c.pid > 0) {
    int status = 0;
    if (waitpid(c.pid, &status, WNOHANG) == 0) {
      kill(c.pid, SIGTERM);
      waitpid(c.pid, &status, 0);
    }
  }
  c = Child{};
}

// Non-JSON tokens some simulators print for non-finite values.
nlohmann::json parse_line(const std::string& line) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
  }
  static const std::regex non_finite(R"((:\s*)[-+]?(NaN|nan|Infinity|inf)\b)");
  const std::string patched = std::regex_replace(line, non_finite, "$1null");
  if (patched == line) throw ModelError("malformed response from external model: " + line);
  try {
    return nlohmann::json::parse(patched);
  } catch (const nlohmann::json::exception&) {
    throw ModelError("malformed response from external model: " + line);
  }
}

}  // namespace

struct ExternalModel::Pool {
  std::vector<Child> children;
  ~Pool() {
    for (auto& c : children) shutdown(c);
  }
  void reset() {
    for (auto& c : children) shutdown(c);
    children.clear();
  }
};

ExternalModel::ExternalModel(ExternalModelSpec spec)
    : Model(spec.name, spec.inputs), spec_(std::move(spec)), pool_(std::make_unique<Pool>()) {
  if (spec_.command.empty()) throw ConfigError("external model needs a command");
  if (spec_.pool_size < 1) throw ConfigError("external model pool size must be at least 1");
  if (!(spec_.timeout_seconds > 0.0)) throw ConfigError("external model timeout must be positive");
}

ExternalModel::~ExternalModel() = default;

double ExternalModel::evaluate(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::MatrixXd one(1, y.size());
  one.row(0) = y.transpose();
  return evaluate_batch(one)[0];
}

Eigen::VectorXd ExternalModel::evaluate_batch(const Eigen::MatrixXd& points) const {
  if (static_cast<std::size_t>(points.cols()) != dimension())
    throw DomainError("model '" + name() + "' expects " + std::to_string(dimension()) + " inputs, got " +
                      std::to_string(points.cols()));
  const Eigen::Index count = points.rows();
  Eigen::VectorXd out(count);
  if (count == 0) return out;

  signal(SIGPIPE, SIG_IGN);
  Pool& pool = *pool_;
  while (pool.children.size() < spec_.pool_size) pool.children.push_back(spawn(spec_.command));

  std::vector<char> done(static_cast<std::size_t>(count), 0);
  std::vector<std::size_t> owner(static_cast<std::size_t>(count), 0);
  Eigen::Index next = 0;
  Eigen::Index finished = 0;
  const auto timeout = std::chrono::duration<double>(spec_.timeout_seconds);

  auto fail = [&](const std::string& message) -> ModelError {
    pool.reset();
    return ModelError(message);
  };

  try {
    while (finished < count) {
      // Top up every child's window.
      for (std::size_t k = 0; k < pool.children.size(); ++k) {
        Child& c = pool.children[k];
        while (c.in_flight < kWindow && next < count) {
          nlohmann::json request;
          request["id"] = next;
          std::vector<double> y(static_cast<std::size_t>(points.cols()));
          for (Eigen::Index n = 0; n < points.cols(); ++n) y[static_cast<std::size_t>(n)] = points(next, n);
          request["y"] = y;
          const std::string line = request.dump() + "\n";
          std::size_t written = 0;
          while (written < line.size()) {
            const ssize_t w = write(c.in, line.data() + written, line.size() - written);
            if (w < 0 && errno == EINTR) continue;
            if (w < 0) throw fail("external model " + describe_status(c.pid) + " before reading request " +
                                  std::to_string(next));
            written += static_cast<std::size_t>(w);
          }
          owner[static_cast<std::size_t>(next)] = k;
          ++c.in_flight;
          ++next;
        }
      }

      std::vector<pollfd> fds;
      for (const auto& c : pool.children) fds.push_back({c.out, POLLIN, 0});
      const int ready =
          poll(fds.data(), fds.size(), static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(timeout).count()));
      if (ready < 0 && errno == EINTR) continue;
      if (ready == 0)
        throw fail("external model timed out after " + std::to_string(spec_.timeout_seconds) + " s with " +
                   std::to_string(count - finished) + " responses pending");

      for (std::size_t k = 0; k < fds.size(); ++k) {
        if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        Child& c = pool.children[k];
        char chunk[4096];
        const ssize_t r = read(c.out, chunk, sizeof chunk);
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) throw fail("external model " + describe_status(c.pid) + " with " +
                               std::to_string(c.in_flight) + " requests unanswered");
        c.buffer.append(chunk, static_cast<std::size_t>(r));

        std::size_t eol;
        while ((eol = c.buffer.find('\n')) != std::string::npos) {
          const std::string line = c.buffer.substr(0, eol);
          c.buffer.erase(0, eol + 1);
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          nlohmann::json response;
          try {
            response = parse_line(line);
          } catch (const ModelError& e) {
            throw fail(e.what());
          }
          if (!response.is_object() || !response.contains("id") || !response.at("id").is_number_integer())
            throw fail("malformed response from external model (no integer id): " + line);
          const auto id = response.at("id").get<long long>();
          if (id < 0 || id >= next || done[static_cast<std::size_t>(id)] || owner[static_cast<std::size_t>(id)] != k)
            throw fail("external model answered unknown or repeated id " + std::to_string(id) + ": " + line);
          const Eigen::VectorXd y = points.row(static_cast<Eigen::Index>(id)).transpose();
          if (response.contains("error")) {
            const auto& err = response.at("error");
            throw fail("external model reported an error at y = " + format_point(y) + ": " +
                       (err.is_string() ? err.get<std::string>() : err.dump()));
          }
          if (!response.contains("value")) throw fail("malformed response from external model (no value): " + line);
          const auto& v = response.at("value");
          double value;
          if (v.is_number()) value = v.get<double>();
          else if (v.is_null()) value = std::numeric_limits<double>::quiet_NaN();
          else throw fail("malformed response from external model (value is not a number): " + line);
          check_result(y, value);
          out[static_cast<Eigen::Index>(id)] = value;
          done[static_cast<std::size_t>(id)] = 1;
          --c.in_flight;
          ++finished;
        }
      }
    }
  } catch (const ModelError&) {
    pool.reset();
    throw;
  }
  return out;
}

std::unique_ptr<Model> external_model(ExternalModelSpec spec) { return std::make_unique<ExternalModel>(std::move(spec)); }

}  // namespace lejapce
