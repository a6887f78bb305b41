#include "a2pm/oracle.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>

#include "a2pm/error.hpp"

namespace a2pm {

NearestCentroidModel NearestCentroidModel::fit(const Dataset& train) {
  const std::size_t classes = train.schema.class_count();
  const std::size_t d = train.values.cols();
  Matrix sums(classes, d, 0.0);
  std::vector<std::size_t> counts(classes, 0);

  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto cls = static_cast<std::size_t>(train.labels[i]);
    for (std::size_t j = 0; j < d; ++j) sums(cls, j) += train.values(i, j);
    ++counts[cls];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0)
      throw DataError("class '" + train.schema.class_names[c] + "' has no training rows");
    for (std::size_t j = 0; j < d; ++j) sums(c, j) /= static_cast<double>(counts[c]);
  }

  NearestCentroidModel model;
  model.centroids_ = std::move(sums);
  return model;
}

int NearestCentroidModel::predict_row(std::span<const double> row) const {
  if (row.size() != centroids_.cols())
    throw DataError("row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(centroids_.cols()));
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids_.rows(); ++c) {
    double dist = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double delta = row[j] - centroids_(c, j);
      dist += delta * delta;
    }
    if (dist < best_dist) {  // strict < keeps ties at the lowest class index
      best_dist = dist;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<int> NearestCentroidModel::predict(const Matrix& rows) {
  std::vector<int> labels(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) labels[i] = predict_row(rows.row(i));
  return labels;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ExternalOracle::ExternalOracle(std::string command)
    : ExternalOracle(std::move(command), Options()) {}

ExternalOracle::ExternalOracle(std::string command, Options options)
    : command_(std::move(command)), options_(options) {
  int to_pipe[2];
  int from_pipe[2];
  if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
    throw OracleError("pipe creation failed: " + std::string(strerror(errno)));

  pid_ = fork();
  if (pid_ < 0) throw OracleError("fork failed: " + std::string(strerror(errno)));

  if (pid_ == 0) {
    setpgid(0, 0);  // own process group, so kill_child reaps grandchildren too
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    close(to_pipe[0]);
    close(to_pipe[1]);
    close(from_pipe[0]);
    close(from_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(to_pipe[0]);
  close(from_pipe[1]);
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
  signal(SIGPIPE, SIG_IGN);  // broken pipes surface as write errors instead
}

ExternalOracle::~ExternalOracle() {
  if (broken_) {
    kill_child();
    return;
  }
  if (!shut_down_) {
    try {
      shutdown();
    } catch (const Error&) {
      kill_child();
    }
  }
}

void ExternalOracle::kill_child() {
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);  // the whole process group
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  shut_down_ = true;
}

void ExternalOracle::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;
  if (to_child_ >= 0) {
    const char quit[] = "QUIT\n";
    [[maybe_unused]] auto n = write(to_child_, quit, sizeof(quit) - 1);
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  int status = 0;
  if (pid_ > 0) {
    waitpid(pid_, &status, 0);
    pid_ = -1;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      throw OracleError("oracle process did not exit cleanly (status " +
                        std::to_string(status) + ")");
  }
}

void ExternalOracle::write_all(const std::string& data) {
  std::size_t written = 0;
  while (written < data.size()) {
    auto n = write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError("write to oracle failed: " + std::string(strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string ExternalOracle::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  for (;;) {
    auto eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }

    const auto remaining = deadline - std::chrono::steady_clock::now();
    if (remaining <= std::chrono::milliseconds(0))
      throw OracleError("oracle reply timed out after " +
                        std::to_string(options_.timeout.count()) + " ms");

    pollfd pfd{from_child_, POLLIN, 0};
    const int timeout_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count() + 1);
    const int ready = poll(&pfd, 1, timeout_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw OracleError("poll on oracle pipe failed: " + std::string(strerror(errno)));
    }
    if (ready == 0)
      throw OracleError("oracle reply timed out after " +
                        std::to_string(options_.timeout.count()) + " ms");

    char chunk[4096];
    auto n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError("read from oracle failed: " + std::string(strerror(errno)));
    }
    if (n == 0) throw OracleError("oracle closed its output mid-reply");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<int> ExternalOracle::request(const Matrix& rows, std::size_t begin,
                                         std::size_t count) {
  std::string msg = "PREDICT " + std::to_string(count) + " " + std::to_string(rows.cols());
  msg += '\n';
  for (std::size_t i = begin; i < begin + count; ++i) {
    auto row = rows.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) msg += ',';
      msg += format_double(row[j]);
    }
    msg += '\n';
  }
  write_all(msg);

  const std::string header = read_line();
  std::size_t expected = 0;
  if (header.rfind("LABELS ", 0) != 0 ||
      std::from_chars(header.data() + 7, header.data() + header.size(), expected).ec !=
          std::errc{})
    throw OracleError("malformed oracle reply header: '" + header + "'");
  if (expected != count)
    throw OracleError("oracle replied with " + std::to_string(expected) +
                      " labels for " + std::to_string(count) + " rows");

  std::vector<int> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string line = read_line();
    int label = 0;
    auto res = std::from_chars(line.data(), line.data() + line.size(), label);
    if (res.ec != std::errc{} || res.ptr != line.data() + line.size())
      throw OracleError("malformed oracle label line: '" + line + "'");
    if (options_.class_count > 0 && (label < 0 || label >= options_.class_count))
      throw OracleError("oracle label " + std::to_string(label) +
                        " outside the schema's " +
                        std::to_string(options_.class_count) + " classes");
    labels.push_back(label);
  }
  return labels;
}

std::vector<int> ExternalOracle::predict(const Matrix& rows) {
  if (shut_down_ || broken_) throw OracleError("oracle is not available");
  try {
    std::vector<int> labels;
    labels.reserve(rows.rows());
    for (std::size_t begin = 0; begin < rows.rows(); begin += kMaxRowsPerRequest) {
      const std::size_t count = std::min(kMaxRowsPerRequest, rows.rows() - begin);
      auto chunk = request(rows, begin, count);
      labels.insert(labels.end(), chunk.begin(), chunk.end());
    }
    return labels;
  } catch (const Error&) {
    broken_ = true;  // out of sync with the child; no clean shutdown possible
    throw;
  }
}

}  // namespace a2pm
