/*
 * Copyright 2026 The lptslearn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "lpts/error.hpp"
#include "lpts/smt/script.hpp"
#include "lpts/smt/sexpr.hpp"

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <map>
#include <string>
#include <variant>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace lpts::smt {

inline constexpr const char* default_solver_command = "z3 -in";

struct SolverConfig {
    /// Shell command reading SMT-LIB 2 on standard input.
    std::string command;
    std::chrono::milliseconds timeout{60000};

    /// Explicit command, else $LPTS_SOLVER_CMD, else the default.
    static SolverConfig resolve(const std::string& explicit_command = "", std::chrono::milliseconds timeout = std::chrono::milliseconds(60000))
    {
        SolverConfig c;
        c.timeout = timeout;
        if (!explicit_command.empty())
            c.command = explicit_command;
        else if (const char* env = std::getenv("LPTS_SOLVER_CMD"); env && *env)
            c.command = env;
        else
            c.command = default_solver_command;
        return c;
    }
};

enum class Status { Sat, Unsat, Unknown, Error };

inline const char* status_name(Status s)
{
    switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
    case Status::Error: return "error";
    }
    return "?";
}

using Value = std::variant<bool, Rational>;

struct SolverVerdict {
    Status status = Status::Error;
    std::map<std::string, Value> assignment;
    std::string message;

    bool boolean(const std::string& id) const
    {
        auto it = assignment.find(id);
        if (it == assignment.end() || !std::holds_alternative<bool>(it->second))
            throw SolverError("no boolean value for " + id);
        return std::get<bool>(it->second);
    }
    const Rational& real(const std::string& id) const
    {
        auto it = assignment.find(id);
        if (it == assignment.end() || !std::holds_alternative<Rational>(it->second))
            throw SolverError("no real value for " + id);
        return std::get<Rational>(it->second);
    }
};

namespace detail {

struct ProcessOutput {
    std::string out;
    std::string err;
    int status = 0;
};

inline void close_fd(int& fd)
{
    if (fd >= 0) ::close(fd);
    fd = -1;
}

/// Runs `sh -c command` feeding `input` on stdin; kills it after `timeout`.
inline ProcessOutput run_process(const std::string& command, const std::string& input,
                                 std::chrono::milliseconds timeout)
{
    int in_pair[2], out_pipe[2], err_pipe[2];
    // A socket for stdin lets writes use MSG_NOSIGNAL if the solver exits early.
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, in_pair) != 0) throw SolverError("socketpair failed");
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) throw SolverError("pipe failed");
    const pid_t pid = ::fork();
    if (pid < 0) throw SolverError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in_pair[1], 0);
        ::dup2(out_pipe[1], 1);
        ::dup2(err_pipe[1], 2);
        for (int fd : {in_pair[0], in_pair[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pair[1]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    int fin = in_pair[0], fout = out_pipe[0], ferr = err_pipe[0];
    ProcessOutput result;
    std::size_t written = 0;
    if (input.empty()) ::shutdown(fin, SHUT_WR);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    bool timed_out = false;
    while (fout >= 0 || ferr >= 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd fds[3];
        int n = 0;
        int in_slot = -1, out_slot = -1, err_slot = -1;
        if (fin >= 0 && written < input.size()) fds[in_slot = n++] = {fin, POLLOUT, 0};
        if (fout >= 0) fds[out_slot = n++] = {fout, POLLIN, 0};
        if (ferr >= 0) fds[err_slot = n++] = {ferr, POLLIN, 0};
        int rc = ::poll(fds, n, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (in_slot >= 0 && fds[in_slot].revents) {
            ssize_t w = ::send(fin, input.data() + written, input.size() - written, MSG_NOSIGNAL);
            if (w > 0) written += static_cast<std::size_t>(w);
            if (w < 0 || written == input.size()) {
                ::shutdown(fin, SHUT_WR);
                written = input.size();
            }
        }
        char buf[65536];
        for (auto [slot, fd, sink] : {std::tuple{out_slot, &fout, &result.out}, std::tuple{err_slot, &ferr, &result.err}}) {
            if (slot < 0 || !fds[slot].revents) continue;
            ssize_t r = ::read(*fd, buf, sizeof buf);
            if (r > 0)
                sink->append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || (errno != EINTR && errno != EAGAIN))
                close_fd(*fd);
        }
    }
    close_fd(fin);
    close_fd(fout);
    close_fd(ferr);
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (timed_out)
        throw SolverError("solver timed out after " + std::to_string(timeout.count()) + " ms");
    result.status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

inline std::string error_text(const SExpr& e)
{
    if (e.items.size() >= 2 && e.items[1].is_atom) return e.items[1].atom;
    return "solver error";
}

} // namespace detail

/// Runs the script and parses the check-sat reply and, when sat, the
/// get-value replies. Launch failures, malformed output and timeouts throw
/// SolverError.
inline SolverVerdict solve(const ConstraintScript& script, const SolverConfig& config)
{
    auto proc = detail::run_process(config.command, script.text, config.timeout);
    std::vector<SExpr> replies;
    try {
        replies = parse_sexprs(proc.out);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " (command: " + config.command + ")");
    }
    SolverVerdict v;
    std::size_t i = 0;
    // Skip replies such as `success` that some solvers print for every command.
    while (i < replies.size() && replies[i].is("success")) ++i;
    if (i == replies.size()) {
        std::string why = proc.err.empty() ? "no output" : proc.err;
        throw SolverError("solver produced no verdict (exit " + std::to_string(proc.status) +
                          ", command: " + config.command + "): " + why);
    }
    const auto& head = replies[i++];
    if (head.is("sat"))
        v.status = Status::Sat;
    else if (head.is("unsat"))
        v.status = Status::Unsat;
    else if (head.is("unknown"))
        v.status = Status::Unknown;
    else if (!head.is_atom && !head.items.empty() && head.items[0].is("error")) {
        v.status = Status::Error;
        v.message = detail::error_text(head);
        return v;
    } else
        throw SolverError("unexpected solver reply (command: " + config.command + ")");
    if (v.status != Status::Sat) return v;
    std::map<std::string, const Symbol*> by_id;
    for (auto& s : script.symbols) by_id[s.id] = &s;
    for (; i < replies.size(); ++i) {
        const auto& r = replies[i];
        if (r.is("success")) continue;
        if (r.is_atom) throw SolverError("unexpected atom in solver output: " + r.atom);
        if (!r.items.empty() && r.items[0].is("error")) {
            v.status = Status::Error;
            v.message = detail::error_text(r);
            return v;
        }
        for (auto& pair : r.items) {
            if (pair.is_atom || pair.items.size() != 2 || !pair.items[0].is_atom)
                throw SolverError("malformed get-value reply");
            auto it = by_id.find(pair.items[0].atom);
            if (it == by_id.end()) throw SolverError("value for undeclared symbol " + pair.items[0].atom);
            if (it->second->sort == Sort::Bool)
                v.assignment[it->first] = value_to_bool(pair.items[1]);
            else
                v.assignment[it->first] = value_to_rational(pair.items[1]);
        }
    }
    for (auto& s : script.symbols)
        if (!v.assignment.count(s.id)) throw SolverError("solver returned no value for " + s.id);
    return v;
}

} // namespace lpts::smt
