// Test peer for the external model protocol. The first argument picks a
// behaviour:
//   first (default)  value = y[0]
//   sum              value = sum of y
//   constant         value = 5
//   garbage          prints a non-JSON line
//   nan              prints a bare NaN value
//   error            answers with an error message
//   exit             exits with status 3 on the first request
//   silent           reads requests and never answers
//   reverse          answers each burst of requests in reverse order

#include <poll.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

bool more_input_ready() {
  if (std::cin.rdbuf()->in_avail() > 0) return true;
  pollfd fd{STDIN_FILENO, POLLIN, 0};
  return poll(&fd, 1, 20) > 0;
}

void answer(const nlohmann::json& request, const std::string& mode) {
  const auto id = request.at("id").get<long long>();
  const auto y = request.at("y").get<std::vector<double>>();
  double value = y.empty() ? 0.0 : y[0];
  if (mode == "sum") {
    value = 0.0;
    for (double v : y) value += v;
  }
  if (mode == "constant") value = 5.0;
  nlohmann::json out{{"id", id}, {"value", value}};
  std::cout << out.dump() << "\n" << std::flush;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "first";
  std::vector<nlohmann::json> burst;
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto request = nlohmann::json::parse(line);
    const auto id = request.at("id").get<long long>();
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
    } else if (mode == "nan") {
      std::cout << "{\"id\": " << id << ", \"value\": NaN}" << std::endl;
    } else if (mode == "error") {
      std::cout << nlohmann::json{{"id", id}, {"error", "solver diverged"}}.dump() << std::endl;
    } else if (mode == "exit") {
      return 3;
    } else if (mode == "silent") {
      continue;
    } else if (mode == "reverse") {
      burst.push_back(request);
      if (!more_input_ready()) {
        for (auto it = burst.rbegin(); it != burst.rend(); ++it) answer(*it, "first");
        burst.clear();
      }
    } else {
      answer(request, mode);
    }
  }
  return 0;
}
