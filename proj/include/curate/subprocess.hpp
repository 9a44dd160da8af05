#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace curate {

// A child process with line-oriented pipes on its stdin and stdout. stderr is inherited.
// The destructor kills and reaps the child.
class Subprocess {
public:
    explicit Subprocess(const std::vector<std::string>& argv);
    ~Subprocess();
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    // Writes `line` plus '\n'. Returns false if the child has closed its stdin.
    bool write_line(std::string_view line);

    enum class ReadStatus { Line, Eof, Timeout };
    ReadStatus read_line(std::string& out, std::chrono::milliseconds timeout);

    void kill();
    pid_t pid() const { return pid_; }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;   // our end of the child's stdin
    int out_fd_ = -1;  // our end of the child's stdout
    std::string buffer_;
};

}  // namespace curate
