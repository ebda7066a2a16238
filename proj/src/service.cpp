#include "hsmdp/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "hsmdp/budget.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/gamify.hpp"
#include "hsmdp/hsolver.hpp"

namespace hsmdp {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

nlohmann::json error_body(std::string_view kind, std::string_view message) {
    return {{"error", kind}, {"message", message}};
}

// Timestamps that arrived as integers go back out as integers.
nlohmann::json timestamp(const std::string& s) {
    if (!s.empty() && s.size() < 19 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::stoll(s);
    return s;
}

std::int64_t epoch_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

} // namespace

ParamError::ParamError(std::vector<std::string> fields)
    : std::invalid_argument("invalid parameters: " + join(fields)), fields_(std::move(fields)) {}

RequestParams config_from_params(const Params& params) {
    RequestParams out;
    std::vector<std::string> bad;
    Config& c = out.cfg;
    auto real = [&](const std::string& key, const std::string& v, double& dst) {
        if (auto x = to_double(v))
            dst = *x;
        else
            bad.push_back(key + ": expected a number");
    };
    auto integer = [&](const std::string& key, const std::string& v, int& dst) {
        if (auto x = to_int(v))
            dst = *x;
        else
            bad.push_back(key + ": expected an integer");
    };
    for (const auto& [key, v] : params) {
        if (key == "gamma") real(key, v, c.gamma);
        else if (key == "loss_rate") real(key, v, c.loss_rate);
        else if (key == "penalty_rate") real(key, v, c.penalty_rate);
        else if (key == "c_pf") real(key, v, c.c_pf);
        else if (key == "slack_reward") real(key, v, c.slack_reward);
        else if (key == "scale") real(key, v, c.scale_m);
        else if (key == "n_durations") integer(key, v, c.n_durations);
        else if (key == "round") integer(key, v, c.round_decimals);
        else if (key == "user") out.user = v;
        else if (key == "mode") {
            if (auto m = flatten_mode_from_string(v))
                out.mode = *m;
            else
                bad.push_back("mode: expected leaves_only or structured");
        } else if (key == "now") {
            if (auto t = parse_datetime(v, 0))
                out.now = *t;
            else
                bad.push_back("now: expected YYYY-MM-DD[THH:mm]");
        } else {
            bad.push_back(key + ": unknown parameter");
        }
    }
    if (bad.empty()) {
        if (c.n_durations > 8) bad.push_back("n_durations: at most 8");
        try {
            c.validate();
        } catch (const ConfigError& e) {
            bad.push_back(e.what());
        }
    }
    if (!bad.empty()) throw ParamError(std::move(bad));
    return out;
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Schedule: return "schedule";
    case Outcome::BadRequest: return "bad_request";
    case Outcome::Invalid: return "invalid";
    case Outcome::Timeout: return "timeout";
    case Outcome::Error: return "error";
    }
    return "error";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
    for (Outcome o : {Outcome::Schedule, Outcome::BadRequest, Outcome::Invalid, Outcome::Timeout, Outcome::Error})
        if (to_string(o) == s) return o;
    return std::nullopt;
}

nlohmann::json to_json(const RequestRecord& r) {
    return {{"user", r.user},
            {"body_hash", r.body_hash},
            {"params", r.params},
            {"outcome", to_string(r.outcome)},
            {"duration_ms", r.duration_ms},
            {"received_ms", r.received_ms}};
}

RequestRecord record_from_json(const nlohmann::json& j) {
    RequestRecord r;
    r.user = j.at("user").get<std::string>();
    r.body_hash = j.at("body_hash").get<std::string>();
    r.params = j.at("params").get<Params>();
    auto o = outcome_from_string(j.at("outcome").get<std::string>());
    if (!o) throw StoreError("unknown outcome in record");
    r.outcome = *o;
    r.duration_ms = j.at("duration_ms").get<double>();
    r.received_ms = j.at("received_ms").get<std::int64_t>();
    return r;
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Stores

void InMemoryStore::append(const RequestRecord& r) {
    std::lock_guard lock(mu_);
    records_.push_back(r);
}

std::vector<RequestRecord> InMemoryStore::read_all() const {
    std::lock_guard lock(mu_);
    return records_;
}

FileStore::FileStore(std::filesystem::path path) : path_(std::move(path)) {}

void FileStore::append(const RequestRecord& r) {
    const std::string line = to_json(r).dump() + "\n";
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw StoreError("cannot open " + path_.string());
    out << line;
    out.flush();
    if (!out) throw StoreError("write to " + path_.string() + " failed");
}

std::vector<RequestRecord> FileStore::read_all() const {
    std::lock_guard lock(mu_);
    std::vector<RequestRecord> out;
    std::ifstream in(path_);
    if (!in) {
        if (!std::filesystem::exists(path_)) return out;
        throw StoreError("cannot read " + path_.string());
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw StoreError(path_.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

ServiceOptions options_from_env() {
    ServiceOptions o;
    if (const char* b = std::getenv("HSMDP_BUDGET_SECONDS"))
        if (auto v = to_double(b); v && *v > 0) o.budget = std::chrono::duration<double>(*v);
    if (const char* c = std::getenv("HSMDP_COMPLEXITY_LIMIT"))
        if (auto v = to_double(c); v && *v >= 0) o.complexity_limit = *v;
    return o;
}

std::shared_ptr<Store> store_from_env() {
    if (const char* p = std::getenv("HSMDP_STORE"); p && *p) return std::make_shared<FileStore>(p);
    return std::make_shared<InMemoryStore>();
}

// ---------------------------------------------------------------------------
// Requests

Service::Service(std::shared_ptr<Store> store, ServiceOptions options)
    : store_(std::move(store)), options_(std::move(options)) {}

void Service::log(std::string_view msg) const {
    if (options_.log)
        options_.log(msg);
    else
        std::cerr << "[hsmdp] " << msg << '\n';
}

void Service::persist(const RequestRecord& r) {
    if (!store_) return;
    try {
        store_->append(r);
    } catch (const std::exception& e) {
        log(std::string("request log unavailable: ") + e.what());
    }
}

Response Service::health() const { return {200, {{"status", "ok"}}}; }

Response Service::handle_post(std::string_view function, const Params& params, std::string_view body) {
    const auto start = std::chrono::steady_clock::now();
    RequestRecord record;
    record.received_ms = epoch_ms();
    record.body_hash = fnv1a_hex(body);
    record.params = params;
    if (auto it = params.find("user"); it != params.end()) record.user = it->second;

    Response res;
    try {
        res = run(function, params, body, record);
    } catch (const std::exception& e) {
        log(std::string("internal error: ") + e.what());
        record.outcome = Outcome::Error;
        res = {500, error_body("internal", "the schedule could not be computed")};
    }
    record.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    persist(record);
    return res;
}

Response Service::run(std::string_view function, const Params& params, std::string_view body,
                      RequestRecord& record) {
    SolveBudget budget(options_.budget);
    record.outcome = Outcome::BadRequest;
    if (function != kScheduleFunction)
        return {404, error_body("unknown_function", "unknown function '" + std::string(function) + "'")};

    RequestParams rp;
    try {
        rp = config_from_params(params);
    } catch (const ParamError& e) {
        auto b = error_body("invalid_parameters", e.what());
        b["fields"] = e.fields();
        return {400, b};
    }

    nlohmann::json json;
    try {
        json = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        return {400, error_body("invalid_json", e.what())};
    }

    ParsedRequest parsed;
    try {
        const TodoRequest req = parse_request(json);
        if (record.user.empty()) record.user = req.userkey;
        parsed = build_todo_list(req, rp.cfg, rp.mode, rp.now);
    } catch (const SchemaError& e) {
        auto b = error_body("schema", e.what());
        b["fields"] = e.fields();
        return {400, b};
    } catch (const ValidationError& e) {
        record.outcome = Outcome::Invalid;
        auto b = error_body("validation", "Please modify your to-do list and try again.");
        b["issues"] = nlohmann::json::array();
        for (const auto& i : e.report().issues)
            b["issues"].push_back({{"id", i.item_id}, {"field", i.field}, {"message", i.message}});
        return {422, b};
    }

    record.outcome = Outcome::Timeout;
    const auto timeout = [&](std::string_view why) {
        return Response{504, error_body("timeout", why)};
    };
    if (options_.complexity_limit > 0 && complexity_guard(parsed.list, rp.cfg) > options_.complexity_limit)
        return timeout("the to-do list is too large to schedule; try fewer tasks or durations");

    Incentives inc;
    try {
        SolverOptions so;
        so.budget = &budget;
        so.record_task_states = false;
        inc = incentivize(parsed.list, 0, rp.cfg, so);
        budget.check();
    } catch (const TimeoutError&) {
        return timeout("the schedule could not be computed within the time limit");
    }
    const DailySchedule day = schedule_today(inc, parsed.list, parsed.today_minutes, rp.cfg);

    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : day.tasks) {
        const Goal& goal = parsed.list.goals[t.goal];
        const Task& task = goal.tasks[t.task];
        nlohmann::json val;
        if (rp.cfg.round_decimals == 0)
            val = static_cast<long long>(t.points);
        else
            val = t.points;
        out.push_back({{"id", task.id},
                       {"nm", task.title + " (" + format_duration(t.display_minutes) + ")"},
                       {"lm", timestamp(task.last_modified)},
                       {"est", t.display_minutes},
                       {"parentId", goal.id},
                       {"pcp", goal.completed},
                       {"val", val}});
    }
    record.outcome = Outcome::Schedule;
    return {200, out};
}

} // namespace hsmdp
