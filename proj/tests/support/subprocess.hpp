#ifndef CELLDESC_TESTS_SUBPROCESS_HPP_
#define CELLDESC_TESTS_SUBPROCESS_HPP_

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support/tempdir.hpp"

namespace testsupport {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

/// Runs `argv` via the shell, capturing stdout/stderr and the exit code.
inline RunResult run_command(const std::vector<std::string>& argv) {
    static TempDir capture_dir;
    static int counter = 0;
    const std::string out_path = capture_dir.join("out" + std::to_string(counter));
    const std::string err_path = capture_dir.join("err" + std::to_string(counter));
    ++counter;

    std::string cmd;
    for (const auto& arg : argv) {
        if (!cmd.empty()) cmd += ' ';
        cmd += shell_quote(arg);
    }
    cmd += " >" + shell_quote(out_path) + " 2>" + shell_quote(err_path);

    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

} // namespace testsupport

#endif // CELLDESC_TESTS_SUBPROCESS_HPP_
