#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rcs/error.hpp"
#include "rcs/sweep.hpp"

namespace rcs {

struct SweepConfig {
    double f_start_hz = 0.0;
    double f_stop_hz = 0.0;
    std::size_t n_points = 0;
    double if_bandwidth_hz = 100e3;
    double power_dbm = 0.0;
};

struct InstrumentEndpoint {
    std::string host = "127.0.0.1";
    int port = 5025;
    int timeout_ms = 5000;
    SweepConfig sweep;

    /// Throws InputError on a bad port, timeout, point count or span.
    void validate() const;
};

enum class AcquisitionErrorCode { connect, timeout, disconnected, malformed, count_mismatch };

std::string_view to_string(AcquisitionErrorCode code) noexcept;

class AcquisitionError : public Error {
public:
    AcquisitionError(AcquisitionErrorCode code, const std::string& what, std::string token = {});
    AcquisitionErrorCode code() const noexcept { return code_; }
    /// The offending response token for `malformed`, empty otherwise.
    const std::string& token() const noexcept { return token_; }

private:
    AcquisitionErrorCode code_;
    std::string token_;
};

/// Configure the instrument, trigger one sweep and read S11 back. Either a
/// complete, validated sweep is returned or AcquisitionError is thrown.
FrequencySweep acquire_sweep(const InstrumentEndpoint& endpoint, Scenario label = Scenario::target);

/// Formats samples the way the instrument sends them: re,im pairs joined by
/// commas, %.17g, newline-terminated.
std::string format_sdata(std::span<const Complex> samples);

enum class FaultMode { none, disconnect, truncate, garbage, delay };

std::string_view to_string(FaultMode mode) noexcept;
FaultMode fault_mode_from_string(std::string_view name);

struct FaultSpec {
    FaultMode mode = FaultMode::none;
    int delay_ms = 0;                      // delay mode: pause before answering a data query
    std::string garbage_token = "#BAD#";   // garbage mode: replaces one value
};

/// Local instrument double. Listens on 127.0.0.1 with an ephemeral port and
/// serves one connection at a time.
class MockVna {
public:
    /// Sweeps are served in order, the last one repeating. Throws IoError if
    /// the socket cannot be bound.
    explicit MockVna(std::vector<std::vector<Complex>> sweeps, FaultSpec fault = {});
    ~MockVna();
    MockVna(const MockVna&) = delete;
    MockVna& operator=(const MockVna&) = delete;

    int port() const noexcept { return port_; }
    void set_fault(FaultSpec fault);
    /// Every command line received so far, in order.
    std::vector<std::string> commands() const;
    int open_connections() const noexcept { return open_connections_.load(); }
    /// Connections accepted so far.
    std::size_t connections_served() const noexcept { return served_.load(); }

    /// Idempotent. Closes the listener and any live connection, joins the thread.
    void stop();

private:
    void run();
    void serve(int fd);
    bool send_all(int fd, const std::string& data);
    bool sleep_for(int ms);

    std::vector<std::vector<Complex>> sweeps_;
    std::size_t next_sweep_ = 0;
    FaultSpec fault_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<int> open_connections_{0};
    std::atomic<std::size_t> served_{0};
    mutable std::mutex mutex_;
    std::condition_variable wake_;
    std::vector<std::string> log_;
    std::thread thread_;
};

}  // namespace rcs
