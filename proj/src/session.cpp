#include "kkm/session.hpp"

#include "kkm/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace kkm {

namespace {

std::vector<int> normalized(std::vector<int> rooms)
{
    std::sort(rooms.begin(), rooms.end());
    rooms.erase(std::unique(rooms.begin(), rooms.end()), rooms.end());
    return rooms;
}

std::size_t index_field(const Json& j, const char* key, std::size_t bound)
{
    if (!j.contains(key) || !j[key].is_number_integer()) fail(ErrorCode::InputError, std::string(key) + " must be an integer", key);
    const auto v = j[key].get<std::int64_t>();
    if (v < 0 || static_cast<std::uint64_t>(v) >= bound)
        fail(ErrorCode::InputError, std::string(key) + " out of range", key);
    return static_cast<std::size_t>(v);
}

} // namespace

SessionConfig session_config_from_json(const Json& j)
{
    require(j.is_object(), "expected a JSON object", "body");
    SessionConfig c;
    if (j.contains("mode")) {
        require(j["mode"] == "interactive" || j["mode"] == "simulated", "mode must be interactive or simulated",
                "mode");
        c.simulated = j["mode"] == "simulated";
    }
    if (j.contains("n")) {
        require(j["n"].is_number_integer() && j["n"].get<std::int64_t>() >= 1 && j["n"].get<std::int64_t>() <= 8,
                "n must be an integer in 1..8", "n");
        c.n = j["n"].get<std::size_t>();
    }
    if (j.contains("room_names")) {
        require(j["room_names"].is_array(), "room_names must be an array of strings", "room_names");
        for (const auto& name : j["room_names"]) {
            require(name.is_string(), "room_names must be an array of strings", "room_names");
            c.room_names.push_back(name.get<std::string>());
        }
        if (c.n == 0) c.n = c.room_names.size();
        require(c.room_names.size() == c.n, "room_names needs one name per room", "room_names");
    }
    require(c.n >= 1, "n is required", "n");
    if (c.room_names.empty())
        for (std::size_t i = 0; i < c.n; ++i) c.room_names.push_back("Room " + std::to_string(i + 1));
    c.eps = c.simulated ? 1e-4 : 1e-2;
    if (j.contains("eps")) {
        require(j["eps"].is_number() && j["eps"].get<double>() > 0 && std::isfinite(j["eps"].get<double>()),
                "eps must be a positive number", "eps");
        c.eps = j["eps"].get<double>();
    }
    if (j.contains("resolution")) {
        require(j["resolution"].is_number_integer() && j["resolution"].get<int>() >= 1 &&
                    j["resolution"].get<int>() <= 64,
                "resolution must be an integer in 1..64", "resolution");
        c.resolution = j["resolution"].get<int>();
    }
    if (c.simulated) {
        require(j.contains("utilities"), "simulated sessions need a utility matrix", "utilities");
        c.utilities = matrix_from_json(j["utilities"], "utilities");
        require(c.utilities.size() == c.n, "utilities needs one row per agent", "utilities");
        for (const auto& row : c.utilities)
            for (double v : row) require(std::isfinite(v) && v >= 0, "utilities must be nonnegative", "utilities");
    }
    if (j.contains("constraints")) {
        require(j["constraints"].is_array(), "constraints must be an array", "constraints");
        for (std::size_t i = 0; i < j["constraints"].size(); ++i) {
            const std::string path = "constraints[" + std::to_string(i) + "]";
            c.constraints.push_back(constraint_from_json(j["constraints"][i], path));
            require(c.constraints.back().normal.dim() == c.n, "normal needs one entry per room", path + ".normal");
        }
    }
    return c;
}

Json to_json(const SessionConfig& c)
{
    Json out{{"n", c.n}, {"room_names", c.room_names}, {"mode", c.simulated ? "simulated" : "interactive"},
             {"eps", c.eps}, {"resolution", c.resolution}};
    if (c.simulated) out["utilities"] = c.utilities;
    if (!c.constraints.empty()) {
        Json cs = Json::array();
        for (const auto& k : c.constraints) cs.push_back(to_json(k));
        out["constraints"] = cs;
    }
    return out;
}

Session::Session(std::string id, SessionConfig config, std::optional<std::filesystem::path> log)
    : Session(std::move(id), std::move(config), std::move(log), true)
{
}

Session::Session(std::string id, SessionConfig config, std::optional<std::filesystem::path> log, bool write_created)
    : id_(std::move(id)), config_(std::move(config)), log_(std::move(log))
{
    if (!write_created) return;
    append(Json{{"event", "created"}, {"id", id_}, {"config", to_json(config_)}});
    run();
}

void Session::append(Json event)
{
    if (log_) {
        if (!out_) out_ = std::make_unique<std::ofstream>(*log_, std::ios::app);
        *out_ << event.dump() << '\n';
        out_->flush();
        if (!*out_) fail(ErrorCode::InternalError, "cannot append to " + log_->string());
    }
    events_.push_back(std::move(event));
}

void Session::record(std::size_t agent, const RVec& prices, std::vector<int> rooms)
{
    rooms = normalized(std::move(rooms));
    Json event{{"event", "answer"}, {"seq", order_.size()}, {"agent", agent}, {"prices", to_json(prices)},
               {"rooms", rooms}};
    answers_[{agent, prices}] = std::move(rooms);
    order_.emplace_back(agent, prices);
    append(std::move(event));
}

void Session::run()
{
    status_ = "solving";
    pending_.reset();
    const AnswerFn oracle = [&](std::size_t agent, const RVec& x) -> std::vector<int> {
        const auto it = answers_.find({agent, x});
        if (it != answers_.end()) return it->second;
        if (config_.simulated && !replaying_) {
            auto rooms = simulated_answer(config_.utilities, agent, x.to_doubles());
            record(agent, x, rooms);
            return rooms;
        }
        throw NeedAnswer(agent, x);
    };
    RentalOptions opt;
    opt.eps = config_.eps;
    opt.initial_resolution = config_.resolution;
    try {
        certificate_ =
            solve_rental(config_.n, oracle, opt, config_.constraints, config_.simulated ? &config_.utilities : nullptr);
        status_ = "done";
    } catch (const NeedAnswer& q) {
        pending_ = Query{order_.size(), q.agent(), q.prices()};
        status_ = "awaiting-answer";
    } catch (const Error& e) {
        error_ = error_json(e);
        status_ = "done";
    }
}

std::unique_ptr<Session> Session::replay(const std::vector<Json>& events, std::optional<std::filesystem::path> log,
                                         bool resume)
{
    require(!events.empty() && events[0].is_object() && events[0].value("event", "") == "created",
            "the first event must be 'created'", "events[0]");
    const auto& created = events[0];
    require(created.contains("id") && created["id"].is_string(), "created event needs an id", "events[0].id");
    require(created.contains("config"), "created event needs a config", "events[0].config");
    std::unique_ptr<Session> s(
        new Session(created["id"].get<std::string>(), session_config_from_json(created["config"]), std::nullopt, false));
    s->events_.push_back(created);
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& e = events[i];
        const std::string path = "events[" + std::to_string(i) + "]";
        require(e.is_object() && e.value("event", "") == "answer", "unknown event", path);
        const std::size_t agent = index_field(e, "agent", s->config_.n);
        require(e.contains("prices") && e.contains("rooms"), "answer events need prices and rooms", path);
        const RVec prices = rvec_from_json(e["prices"], path + ".prices");
        std::vector<int> rooms;
        for (const auto& r : e["rooms"]) {
            require(r.is_number_integer() && r.get<int>() >= 0 && static_cast<std::size_t>(r.get<int>()) < s->config_.n,
                    "room out of range", path + ".rooms");
            rooms.push_back(r.get<int>());
        }
        s->record(agent, prices, std::move(rooms));
    }
    s->replaying_ = true;
    s->run();
    s->replaying_ = false;
    s->log_ = std::move(log);
    if (resume && s->config_.simulated && s->pending_) s->run();
    return s;
}

std::vector<Json> Session::read_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InputError, "cannot read " + path.string(), "log");
    std::vector<Json> events;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        try {
            events.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            fail(ErrorCode::InputError, path.string() + ":" + std::to_string(n) + ": " + e.what(),
                 "line " + std::to_string(n));
        }
    }
    return events;
}

namespace {

Json query_json(const std::optional<Query>& q)
{
    if (!q) return nullptr;
    return Json{{"query", q->seq}, {"agent", q->agent}, {"prices", prices_json(q->prices)}};
}

} // namespace

Json Session::pending_json() const
{
    std::lock_guard lock(mu_);
    return query_json(pending_);
}

std::optional<Query> Session::pending() const
{
    std::lock_guard lock(mu_);
    return pending_;
}

std::optional<Json> Session::result() const
{
    std::lock_guard lock(mu_);
    if (certificate_) return to_json(*certificate_);
    if (error_) return *error_;
    return std::nullopt;
}

std::vector<Json> Session::events() const
{
    std::lock_guard lock(mu_);
    return events_;
}

Json Session::state() const
{
    std::lock_guard lock(mu_);
    Json answers = Json::array();
    for (std::size_t seq = 0; seq < order_.size(); ++seq) {
        const auto& key = order_[seq];
        answers.push_back(Json{{"query", seq}, {"agent", key.first}, {"prices", prices_json(key.second)},
                               {"rooms", answers_.at(key)}});
    }
    Json out{{"id", id_},
             {"n", config_.n},
             {"room_names", config_.room_names},
             {"mode", config_.simulated ? "simulated" : "interactive"},
             {"eps", config_.eps},
             {"state", status_},
             {"pending_query", query_json(pending_)},
             {"answers", answers}};
    out["result"] = certificate_ ? to_json(*certificate_) : Json(nullptr);
    out["error"] = error_ ? (*error_)["error"] : Json(nullptr);
    return out;
}

AnswerOutcome Session::answer(const Json& body)
{
    std::lock_guard lock(mu_);
    std::size_t agent = 0;
    std::vector<int> rooms;
    try {
        require(body.is_object(), "expected a JSON object", "body");
        agent = index_field(body, "agent", config_.n);
        if (body.contains("rooms")) {
            require(body["rooms"].is_array() && !body["rooms"].empty(), "rooms must be a nonempty array", "rooms");
            for (std::size_t i = 0; i < body["rooms"].size(); ++i) {
                Json one{{"room", body["rooms"][i]}};
                rooms.push_back(static_cast<int>(index_field(one, "room", config_.n)));
            }
        } else {
            rooms.push_back(static_cast<int>(index_field(body, "room", config_.n)));
        }
    } catch (const Error& e) {
        return {AnswerStatus::Invalid, e.what(), e.field()};
    }
    rooms = normalized(std::move(rooms));

    const auto already = [&](const std::pair<std::size_t, RVec>& key) -> std::optional<AnswerOutcome> {
        const auto it = answers_.find(key);
        if (it == answers_.end()) return std::nullopt;
        if (key.first == agent && it->second == rooms) return AnswerOutcome{AnswerStatus::Duplicate, "already recorded", {}};
        return AnswerOutcome{AnswerStatus::Conflict, "query already answered differently", "room"};
    };
    if (body.contains("query")) {
        if (!body["query"].is_number_integer() || body["query"].get<std::int64_t>() < 0)
            return {AnswerStatus::Invalid, "query must be a nonnegative integer", "query"};
        const auto seq = body["query"].get<std::size_t>();
        if (seq < order_.size()) {
            if (order_[seq].first != agent) return {AnswerStatus::Conflict, "query was for another agent", "agent"};
            return *already(order_[seq]);
        }
        if (!pending_ || seq != pending_->seq) return {AnswerStatus::Conflict, "query superseded", "query"};
    }
    if (body.contains("prices")) {
        RVec prices;
        try {
            prices = rvec_from_json(body["prices"], "prices");
        } catch (const Error& e) {
            return {AnswerStatus::Invalid, e.what(), e.field()};
        }
        if (auto done = already({agent, prices})) return *done;
        if (!pending_ || pending_->prices != prices) return {AnswerStatus::Conflict, "query superseded", "prices"};
    }
    if (!pending_) return {AnswerStatus::Conflict, "no pending query", "agent"};
    if (pending_->agent != agent)
        return {AnswerStatus::Conflict, "pending query is for agent " + std::to_string(pending_->agent), "agent"};

    bool any_free = false, picked_free = false;
    for (std::size_t j = 0; j < config_.n; ++j) any_free = any_free || pending_->prices[j] == 0;
    for (int r : rooms) picked_free = picked_free || pending_->prices[r] == 0;
    if (any_free && !picked_free)
        return {AnswerStatus::Invalid, "some room is free at these prices; a free room must be among the answers",
                "room"};

    record(agent, pending_->prices, rooms);
    run();
    return {AnswerStatus::Accepted, {}, {}};
}

SessionStore::SessionStore(std::optional<std::filesystem::path> data_dir) : dir_(std::move(data_dir))
{
    if (!dir_) return;
    std::filesystem::create_directories(*dir_);
    std::vector<std::filesystem::path> logs;
    for (const auto& entry : std::filesystem::directory_iterator(*dir_))
        if (entry.path().extension() == ".jsonl") logs.push_back(entry.path());
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
        std::shared_ptr<Session> s = Session::replay(Session::read_log(path), path, true);
        const auto& id = s->id();
        if (id.size() > 1 && id[0] == 's' && id.find_first_not_of("0123456789", 1) == std::string::npos)
            next_ = std::max(next_, std::stoul(id.substr(1)) + 1);
        sessions_.emplace(id, std::move(s));
    }
}

std::string SessionStore::create(const SessionConfig& config)
{
    std::string id;
    {
        std::lock_guard lock(mu_);
        id = "s" + std::to_string(next_++);
    }
    std::optional<std::filesystem::path> log;
    if (dir_) log = *dir_ / (id + ".jsonl");
    auto s = std::make_shared<Session>(id, config, log);
    std::lock_guard lock(mu_);
    sessions_.emplace(id, std::move(s));
    return id;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const
{
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionStore::ids() const
{
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

} // namespace kkm
