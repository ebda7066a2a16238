#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

/// Wall-clock time in the user's zone, minute resolution.
struct LocalDateTime {
    std::chrono::sys_days day{};
    int minute = 0;   ///< minutes since local midnight, [0, 1440)

    std::chrono::weekday weekday() const { return std::chrono::weekday{day}; }
    std::int64_t epoch_minutes() const;
    static LocalDateTime from_epoch_minutes(std::int64_t m);
    std::string to_string() const;   ///< "YYYY-MM-DD HH:mm"

    friend bool operator==(const LocalDateTime&, const LocalDateTime&) = default;
    friend auto operator<=>(const LocalDateTime&, const LocalDateTime&) = default;
};

/// Parses "YYYY-MM-DD", "YYYY-MM-DD HH:mm" or "YYYY-MM-DDTHH:mm[:ss]". Missing time gives
/// `default_minute`.
std::optional<LocalDateTime> parse_datetime(std::string_view s, int default_minute = 23 * 60 + 59);

struct FieldError {
    std::size_t position = 0;
    std::string field;
    std::string message;
};

struct ParsedAttributes {
    std::optional<int> goal_code;
    std::optional<long long> value;
    std::optional<LocalDateTime> deadline;
    std::optional<int> est_minutes;
    std::set<std::string> tags;              ///< lower-case, without '#'
    std::optional<double> hours_today;
    std::optional<double> hours_typical;
    std::string name;                        ///< remaining text, whitespace collapsed
    std::vector<FieldError> errors;

    bool ok() const { return errors.empty(); }
    /// Attribute equality, ignoring errors.
    bool same_attributes(const ParsedAttributes& o) const;
};

/// Extracts every recognized pattern from an item title. Never throws.
ParsedAttributes parse_title(std::string_view title);

/// Canonical title that parses back to the same attributes.
std::string render_title(const ParsedAttributes& a);

/// Working minutes between `now` and `deadline`: the rest of today capped by today's
/// workload, then each later day capped by the typical workload. Throws DomainError
/// when the deadline has passed.
Minutes deadline_to_working_minutes(const LocalDateTime& deadline, const LocalDateTime& now,
                                    Minutes today_minutes, Minutes typical_minutes);

// ---------------------------------------------------------------------------
// Request body

struct RawItem {
    std::string id;
    std::string nm;
    std::string lm;
    std::optional<std::string> cp;   ///< completion stamp
    std::vector<RawItem> ch;
};

struct Intention {
    std::string goal_code;   ///< _c
    std::string id;          ///< _id
    bool done = false;       ///< d
    bool never_mind = false; ///< nvm
    std::string title;       ///< t
    double value = 0.0;      ///< vd
};

struct TodoRequest {
    std::vector<Intention> intentions;
    std::vector<RawItem> projects;
    int timezone_offset_minutes = 0;
    std::optional<double> today_hours;
    std::optional<double> typical_hours;
    std::string userkey;
    std::string updated;
};

/// Body does not match the request schema. Carries every offending field.
class SchemaError : public std::invalid_argument {
public:
    explicit SchemaError(std::vector<std::string> fields);
    const std::vector<std::string>& fields() const { return fields_; }

private:
    std::vector<std::string> fields_;
};

TodoRequest parse_request(const nlohmann::json& body);

struct Issue {
    std::string item_id;
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> issues;
    bool ok() const { return issues.empty(); }
};

/// The parsed list needs changes from the user before it can be scheduled.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

enum class FlattenMode { LeavesOnly, Structured };

std::optional<FlattenMode> flatten_mode_from_string(std::string_view s);

struct FlattenOptions {
    FlattenMode mode = FlattenMode::LeavesOnly;
    LocalDateTime now;
    Minutes today_minutes = 600;
    Minutes typical_minutes = 600;
};

/// Goals are the root items carrying a #CG code; tasks come from their subtrees. Every
/// problem found is appended to `report` rather than thrown.
ToDoList flatten_tree(const std::vector<RawItem>& projects, const FlattenOptions& options,
                      ValidationReport& report);

/// Marks tasks forced or ineligible for today from their tags and the intentions list.
void apply_scheduling(ToDoList& list, const std::vector<Intention>& intentions,
                      const LocalDateTime& now);

/// Goal value range and value per estimated minute.
ValidationReport validate(const ToDoList& list, const Config& cfg);

struct ParsedRequest {
    ToDoList list;
    Minutes today_minutes = 0;
    Minutes typical_minutes = 0;
    LocalDateTime now;
};

/// Full pipeline from request body to a validated list. Throws SchemaError or
/// ValidationError.
ParsedRequest build_todo_list(const TodoRequest& request, const Config& cfg, FlattenMode mode,
                              std::optional<LocalDateTime> now_local);

/// Current wall-clock time shifted into the user's zone (local = UTC + offset).
LocalDateTime local_now(int timezone_offset_minutes);

} // namespace hsmdp
