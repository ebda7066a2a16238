#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hsmdp/config.hpp"
#include "hsmdp/parser.hpp"

namespace httplib {
class Server;
}

namespace hsmdp {

using Params = std::map<std::string, std::string>;

/// One or more request parameters are unknown or out of range.
class ParamError : public std::invalid_argument {
public:
    explicit ParamError(std::vector<std::string> fields);
    const std::vector<std::string>& fields() const { return fields_; }

private:
    std::vector<std::string> fields_;
};

struct RequestParams {
    Config cfg;
    FlattenMode mode = FlattenMode::LeavesOnly;
    std::string user;
    std::optional<LocalDateTime> now;   ///< local wall clock; the server clock when absent
};

/// Named parameters: gamma, loss_rate, penalty_rate, n_durations, c_pf, slack_reward, scale,
/// round, mode, user, now. Omitted ones keep the Config defaults.
RequestParams config_from_params(const Params& params);

enum class Outcome { Schedule, BadRequest, Invalid, Timeout, Error };

std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);

struct RequestRecord {
    std::string user;
    std::string body_hash;
    Params params;
    Outcome outcome = Outcome::Error;
    double duration_ms = 0.0;
    std::int64_t received_ms = 0;   ///< unix epoch

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

nlohmann::json to_json(const RequestRecord& r);
RequestRecord record_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(std::string_view data);

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only request log. Implementations must accept concurrent appends.
class Store {
public:
    virtual ~Store() = default;
    virtual void append(const RequestRecord& r) = 0;
    virtual std::vector<RequestRecord> read_all() const = 0;
};

class InMemoryStore : public Store {
public:
    void append(const RequestRecord& r) override;
    std::vector<RequestRecord> read_all() const override;

private:
    mutable std::mutex mu_;
    std::vector<RequestRecord> records_;
};

/// One JSON record per line.
class FileStore : public Store {
public:
    explicit FileStore(std::filesystem::path path);
    void append(const RequestRecord& r) override;
    std::vector<RequestRecord> read_all() const override;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
};

struct ServiceOptions {
    std::chrono::duration<double> budget{28.0};
    /// Requests whose estimated solver size exceeds this are refused up front as timeouts.
    /// Zero disables the check.
    double complexity_limit = 1e10;
    std::function<void(std::string_view)> log;   ///< defaults to stderr
};

/// HSMDP_BUDGET_SECONDS and HSMDP_COMPLEXITY_LIMIT override the defaults.
ServiceOptions options_from_env();

/// HSMDP_STORE names a JSONL file; in-memory otherwise.
std::shared_ptr<Store> store_from_env();

struct Response {
    int status = 200;
    nlohmann::json body;
};

class Service {
public:
    explicit Service(std::shared_ptr<Store> store, ServiceOptions options = {});

    /// POST /api/<function>. Every call is persisted once, whatever its outcome.
    Response handle_post(std::string_view function, const Params& params, std::string_view body);
    Response health() const;

private:
    Response run(std::string_view function, const Params& params, std::string_view body,
                 RequestRecord& record);
    void persist(const RequestRecord& r);
    void log(std::string_view msg) const;

    std::shared_ptr<Store> store_;
    ServiceOptions options_;
};

inline constexpr std::string_view kScheduleFunction = "getTasksForToday";

/// Routes: POST /api/<function>?<params>, GET /health.
void mount(httplib::Server& server, Service& service);

} // namespace hsmdp
