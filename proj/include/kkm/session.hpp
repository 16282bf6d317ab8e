#pragma once

#include "kkm/harmony.hpp"
#include "kkm/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace kkm {

struct SessionConfig {
    std::size_t n = 0;
    std::vector<std::string> room_names;
    bool simulated = false;
    RealMatrix utilities;  // simulated sessions only
    double eps = 1e-2;
    int resolution = 4;
    std::vector<LinearConstraint> constraints;
};

/// Parses a POST /sessions body.  Defaults: room names "Room 1".., eps 1e-2
/// for interactive and 1e-4 for simulated sessions.
SessionConfig session_config_from_json(const Json& j);
Json to_json(const SessionConfig& c);

struct Query {
    std::size_t seq = 0;  // number of answers logged before it
    std::size_t agent = 0;
    RVec prices;
};

enum class AnswerStatus { Accepted, Duplicate, Conflict, Invalid };

struct AnswerOutcome {
    AnswerStatus status;
    std::string message;
    std::string field;
};

/// One rental session.  Every mutation appends an event to the log and reruns
/// the deterministic solver on the recorded answers until it either needs a
/// new answer or finishes.  Thread-safe; reads see a consistent snapshot.
class Session {
public:
    /// `log` is appended to when set; the created event is written at once.
    Session(std::string id, SessionConfig config, std::optional<std::filesystem::path> log = std::nullopt);

    /// Rebuilds a session from its event lines.  Answers are taken from the
    /// log only; the oracle of a simulated session is not consulted unless
    /// `resume` is set (crash recovery), and then only for missing answers.
    static std::unique_ptr<Session> replay(const std::vector<Json>& events,
                                           std::optional<std::filesystem::path> log = std::nullopt,
                                           bool resume = false);
    static std::vector<Json> read_log(const std::filesystem::path& path);

    const std::string& id() const { return id_; }
    Json state() const;
    std::optional<Query> pending() const;
    Json pending_json() const;
    /// The certificate, or the solver error, once finished.
    std::optional<Json> result() const;
    std::vector<Json> events() const;

    /// body: {"agent", "room" | "rooms", optional "query" (seq) or "prices"}.
    AnswerOutcome answer(const Json& body);

private:
    Session(std::string id, SessionConfig config, std::optional<std::filesystem::path> log, bool write_created);
    void append(Json event);
    void run();
    void record(std::size_t agent, const RVec& prices, std::vector<int> rooms);

    mutable std::mutex mu_;
    std::string id_;
    SessionConfig config_;
    std::optional<std::filesystem::path> log_;
    std::unique_ptr<std::ofstream> out_;
    std::vector<Json> events_;
    std::map<std::pair<std::size_t, RVec>, std::vector<int>> answers_;
    std::vector<std::pair<std::size_t, RVec>> order_;  // answer keys by seq
    bool replaying_ = false;
    std::string status_ = "collecting";
    std::optional<Query> pending_;
    std::optional<DivisionCertificate> certificate_;
    std::optional<Json> error_;
};

/// Sessions by id, persisted as <data_dir>/<id>.jsonl.
class SessionStore {
public:
    explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt);
    std::string create(const SessionConfig& config);
    std::shared_ptr<Session> find(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    mutable std::mutex mu_;
    std::optional<std::filesystem::path> dir_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::size_t next_ = 1;
};

} // namespace kkm
