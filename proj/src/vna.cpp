#include "rcs/vna.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace rcs {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxLine = std::size_t{1} << 26;

// Owns one socket descriptor.
class Socket {
public:
    explicit Socket(int fd = -1) noexcept : fd_(fd) {}
    ~Socket() { reset(); }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    int get() const noexcept { return fd_; }
    void reset() noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_;
};

std::string errno_text() { return std::strerror(errno); }

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left > 0 ? static_cast<int>(left) : 0;
}

Socket connect_to(const InstrumentEndpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw AcquisitionError(AcquisitionErrorCode::connect,
                               "cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
    }
    const auto deadline = Clock::now() + std::chrono::milliseconds(ep.timeout_ms);
    std::string last = "no address";
    bool timed_out = false;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (s.get() < 0) {
            last = errno_text();
            continue;
        }
        const int flags = ::fcntl(s.get(), F_GETFL, 0);
        ::fcntl(s.get(), F_SETFL, flags | O_NONBLOCK);
        if (::connect(s.get(), ai->ai_addr, ai->ai_addrlen) != 0) {
            if (errno != EINPROGRESS) {
                last = errno_text();
                continue;
            }
            pollfd p{s.get(), POLLOUT, 0};
            const int rc = ::poll(&p, 1, remaining_ms(deadline));
            if (rc == 0) {
                timed_out = true;
                last = "connect timed out";
                continue;
            }
            int err = 0;
            socklen_t len = sizeof err;
            ::getsockopt(s.get(), SOL_SOCKET, SO_ERROR, &err, &len);
            if (rc < 0 || err != 0) {
                last = std::strerror(rc < 0 ? errno : err);
                continue;
            }
        }
        ::freeaddrinfo(res);
        int one = 1;
        ::setsockopt(s.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return s;
    }
    ::freeaddrinfo(res);
    const std::string where = ep.host + ":" + port;
    if (timed_out) throw AcquisitionError(AcquisitionErrorCode::timeout, "connect to " + where + " timed out");
    throw AcquisitionError(AcquisitionErrorCode::connect, "cannot connect to " + where + ": " + last);
}

class ScpiSession {
public:
    ScpiSession(Socket sock, int timeout_ms) : sock_(std::move(sock)), timeout_ms_(timeout_ms) {}

    void write(const std::string& command) {
        const std::string line = command + "\n";
        const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
        std::size_t sent = 0;
        while (sent < line.size()) {
            const ssize_t n = ::send(sock_.get(), line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
            if (n > 0) {
                sent += static_cast<std::size_t>(n);
                continue;
            }
            if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
                pollfd p{sock_.get(), POLLOUT, 0};
                if (::poll(&p, 1, remaining_ms(deadline)) == 0) {
                    throw AcquisitionError(AcquisitionErrorCode::timeout, "timed out sending '" + command + "'");
                }
                continue;
            }
            if (n < 0 && errno == EINTR) continue;
            throw AcquisitionError(AcquisitionErrorCode::disconnected,
                                   "connection lost sending '" + command + "'");
        }
    }

    std::string query(const std::string& command) {
        write(command);
        return read_line(command);
    }

private:
    std::string read_line(const std::string& command) {
        const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
        for (;;) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (buffer_.size() > kMaxLine) {
                throw AcquisitionError(AcquisitionErrorCode::malformed, "response to '" + command + "' too long");
            }
            pollfd p{sock_.get(), POLLIN, 0};
            const int rc = ::poll(&p, 1, remaining_ms(deadline));
            if (rc == 0) {
                throw AcquisitionError(AcquisitionErrorCode::timeout,
                                       "no response to '" + command + "' within " + std::to_string(timeout_ms_) +
                                           " ms");
            }
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw AcquisitionError(AcquisitionErrorCode::disconnected, "poll failed: " + errno_text());
            }
            char chunk[65536];
            const ssize_t n = ::recv(sock_.get(), chunk, sizeof chunk, 0);
            if (n == 0) {
                throw AcquisitionError(AcquisitionErrorCode::disconnected,
                                       "instrument closed the connection during '" + command + "' after " +
                                           std::to_string(buffer_.size()) + " bytes");
            }
            if (n < 0) {
                if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
                throw AcquisitionError(AcquisitionErrorCode::disconnected, "read failed: " + errno_text());
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    Socket sock_;
    int timeout_ms_;
    std::string buffer_;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<double> parse_values(std::string_view line) {
    std::vector<double> values;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        const auto token = trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        double v = 0.0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
            throw AcquisitionError(AcquisitionErrorCode::malformed,
                                   "malformed value '" + std::string(token) + "' at position " +
                                       std::to_string(values.size()),
                                   std::string(token));
        }
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return values;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void InstrumentEndpoint::validate() const {
    if (port < 1 || port > 65535) throw InputError("instrument port must be in [1, 65535]");
    if (timeout_ms <= 0) throw InputError("timeout_ms must be positive");
    if (host.empty()) throw InputError("instrument host is empty");
    // Reuses the grid checks (n >= 2, ordered positive span).
    FrequencyGrid(sweep.f_start_hz, sweep.f_stop_hz, sweep.n_points);
    if (!(sweep.if_bandwidth_hz > 0.0) || !std::isfinite(sweep.power_dbm)) {
        throw InputError("IF bandwidth must be positive and power finite");
    }
}

std::string_view to_string(AcquisitionErrorCode code) noexcept {
    switch (code) {
        case AcquisitionErrorCode::connect: return "connect";
        case AcquisitionErrorCode::timeout: return "timeout";
        case AcquisitionErrorCode::disconnected: return "disconnected";
        case AcquisitionErrorCode::malformed: return "malformed";
        case AcquisitionErrorCode::count_mismatch: return "count_mismatch";
    }
    return "unknown";
}

AcquisitionError::AcquisitionError(AcquisitionErrorCode code, const std::string& what, std::string token)
    : Error(std::string(to_string(code)) + ": " + what), code_(code), token_(std::move(token)) {}

std::string format_sdata(std::span<const Complex> samples) {
    std::string out;
    out.reserve(samples.size() * 50);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i) out += ',';
        out += fmt(samples[i].real());
        out += ',';
        out += fmt(samples[i].imag());
    }
    out += '\n';
    return out;
}

FrequencySweep acquire_sweep(const InstrumentEndpoint& endpoint, Scenario label) {
    endpoint.validate();
    const auto& cfg = endpoint.sweep;
    ScpiSession session(connect_to(endpoint), endpoint.timeout_ms);

    session.write("SENS:FREQ:STAR " + fmt(cfg.f_start_hz));
    session.write("SENS:FREQ:STOP " + fmt(cfg.f_stop_hz));
    session.write("SENS:SWE:POIN " + std::to_string(cfg.n_points));
    session.write("SENS:BAND " + fmt(cfg.if_bandwidth_hz));
    session.write("SOUR:POW " + fmt(cfg.power_dbm));
    session.write("INIT:IMM");
    if (const auto opc = session.query("*OPC?"); trim(opc) != "1") {
        throw AcquisitionError(AcquisitionErrorCode::malformed, "unexpected *OPC? reply '" + opc + "'", opc);
    }
    const auto values = parse_values(session.query("CALC:DATA? SDATA"));
    if (values.size() % 2 != 0) {
        throw AcquisitionError(AcquisitionErrorCode::malformed,
                               "odd number of values (" + std::to_string(values.size()) + ")");
    }
    if (values.size() / 2 != cfg.n_points) {
        throw AcquisitionError(AcquisitionErrorCode::count_mismatch,
                               "expected " + std::to_string(cfg.n_points) + " points, got " +
                                   std::to_string(values.size() / 2));
    }
    std::vector<Complex> samples(cfg.n_points);
    for (std::size_t i = 0; i < cfg.n_points; ++i) samples[i] = {values[2 * i], values[2 * i + 1]};
    try {
        return FrequencySweep(FrequencyGrid(cfg.f_start_hz, cfg.f_stop_hz, cfg.n_points), std::move(samples), label);
    } catch (const InputError& e) {
        throw AcquisitionError(AcquisitionErrorCode::malformed, e.what());
    }
}

std::string_view to_string(FaultMode mode) noexcept {
    switch (mode) {
        case FaultMode::none: return "none";
        case FaultMode::disconnect: return "disconnect";
        case FaultMode::truncate: return "truncate";
        case FaultMode::garbage: return "garbage";
        case FaultMode::delay: return "delay";
    }
    return "unknown";
}

FaultMode fault_mode_from_string(std::string_view name) {
    for (const auto m : {FaultMode::none, FaultMode::disconnect, FaultMode::truncate, FaultMode::garbage,
                         FaultMode::delay}) {
        if (to_string(m) == name) return m;
    }
    throw InputError("unknown fault mode '" + std::string(name) + "'");
}

MockVna::MockVna(std::vector<std::vector<Complex>> sweeps, FaultSpec fault)
    : sweeps_(std::move(sweeps)), fault_(std::move(fault)) {
    if (sweeps_.empty()) throw InputError("mock instrument needs at least one sweep");
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listen_fd_ < 0) throw IoError("socket: " + errno_text());
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 4) != 0) {
        const std::string msg = errno_text();
        ::close(listen_fd_);
        throw IoError("mock instrument bind failed: " + msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { run(); });
}

MockVna::~MockVna() { stop(); }

void MockVna::set_fault(FaultSpec fault) {
    std::lock_guard lock(mutex_);
    fault_ = std::move(fault);
}

std::vector<std::string> MockVna::commands() const {
    std::lock_guard lock(mutex_);
    return log_;
}

void MockVna::stop() {
    if (stopping_.exchange(true)) {
        if (thread_.joinable()) thread_.join();
        return;
    }
    wake_.notify_all();
    if (thread_.joinable()) thread_.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
}

bool MockVna::sleep_for(int ms) {
    std::unique_lock lock(mutex_);
    return !wake_.wait_for(lock, std::chrono::milliseconds(ms), [this] { return stopping_.load(); });
}

bool MockVna::send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

void MockVna::run() {
    while (!stopping_.load()) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, 20) <= 0) continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        ++open_connections_;
        ++served_;
        serve(fd);
        ::close(fd);
        --open_connections_;
    }
}

void MockVna::serve(int fd) {
    std::string buffer;
    while (!stopping_.load()) {
        const auto nl = buffer.find('\n');
        if (nl == std::string::npos) {
            pollfd p{fd, POLLIN, 0};
            const int rc = ::poll(&p, 1, 20);
            if (rc == 0) continue;
            if (rc < 0 && errno == EINTR) continue;
            char chunk[4096];
            const ssize_t n = rc < 0 ? -1 : ::recv(fd, chunk, sizeof chunk, 0);
            if (n <= 0) return;
            buffer.append(chunk, static_cast<std::size_t>(n));
            continue;
        }
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();

        FaultSpec fault;
        std::vector<Complex> data;
        {
            std::lock_guard lock(mutex_);
            log_.push_back(line);
            fault = fault_;
            if (line == "CALC:DATA? SDATA") {
                data = sweeps_[std::min(next_sweep_, sweeps_.size() - 1)];
                ++next_sweep_;
            }
        }
        if (line == "*IDN?") {
            if (!send_all(fd, "RCS,MockVNA,0,1.0\n")) return;
        } else if (line == "*OPC?") {
            if (!send_all(fd, "1\n")) return;
        } else if (line == "CALC:DATA? SDATA") {
            std::string payload;
            switch (fault.mode) {
                case FaultMode::none:
                    payload = format_sdata(data);
                    break;
                case FaultMode::delay:
                    if (!sleep_for(fault.delay_ms)) return;
                    payload = format_sdata(data);
                    break;
                case FaultMode::truncate:
                    if (!data.empty()) data.pop_back();
                    payload = format_sdata(data);
                    break;
                case FaultMode::garbage: {
                    payload = format_sdata(data);
                    // Replace the value after the middle comma.
                    std::size_t start = payload.find(',', payload.size() / 2);
                    start = start == std::string::npos ? 0 : start + 1;
                    std::size_t stop = payload.find_first_of(",\n", start);
                    payload.replace(start, stop - start, fault.garbage_token);
                    break;
                }
                case FaultMode::disconnect:
                    // Half a response and no terminator, then hang up.
                    payload = format_sdata(data);
                    send_all(fd, payload.substr(0, payload.size() / 2));
                    return;
            }
            if (!send_all(fd, payload)) return;
        }
        // Set commands need no reply.
    }
}

}  // namespace rcs
