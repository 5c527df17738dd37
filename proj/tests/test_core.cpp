#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "defcon/actions.hpp"
#include "defcon/geometry.hpp"
#include "defcon/io.hpp"
#include "defcon/kinematics.hpp"
#include "defcon/rng.hpp"

using namespace defcon;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("point-segment distance and corridor counting") {
    const Vec2 a{0, 0}, b{10, 0};
    CHECK(point_segment_distance({5, 3}, a, b) == Catch::Approx(3.0));
    CHECK(point_segment_distance({-4, 0}, a, b) == Catch::Approx(4.0));
    CHECK(point_segment_distance({5, 0}, a, b) == Catch::Approx(0.0));

    std::vector<Vec2> opps = {{5, 4.9}, {5, 5.1}, {12, 0}, {5, -4.9}};
    CHECK(corridor_count(a, b, opps, 10.0) == 2);
    // zero-length segment degenerates to a disc
    std::vector<Vec2> near = {{3, 0}, {6, 0}};
    CHECK(corridor_count(a, a, near, 10.0) == 1);
}

TEST_CASE("triangle membership") {
    const Vec2 apex{0, 0}, p1{10, -2}, p2{10, 2};
    std::vector<Vec2> pts = {{5, 0}, {5, 0.9}, {5, -3}, {10, 0}};
    CHECK(triangle_count(apex, p1, p2, pts) == 3);  // boundary inclusive
}

TEST_CASE("kinematics: constant position") {
    std::vector<Vec2> pos(10, Vec2{3.0, 4.0});
    auto k = derive_kinematics(pos, 0.04);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(k.velocity[i].norm() == Catch::Approx(0.0).margin(1e-12));
        CHECK(k.acceleration[i] == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("kinematics: uniform linear motion") {
    std::vector<Vec2> pos;
    for (int i = 0; i < 12; ++i) pos.push_back({2.0 * 0.04 * i, 1.0});
    auto k = derive_kinematics(pos, 0.04);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(k.velocity[i].x == Catch::Approx(2.0));
        CHECK(k.velocity[i].y == Catch::Approx(0.0).margin(1e-12));
        CHECK(k.acceleration[i] == Catch::Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("kinematics: uniform acceleration from rest") {
    const double dt = 0.04;
    std::vector<Vec2> pos;
    for (int i = 0; i < 50; ++i) {
        const double t = dt * i;
        pos.push_back({0.5 * t * t, 0.0});  // a = 1 m/s^2
    }
    auto k = derive_kinematics(pos, dt);
    for (std::size_t i = 4; i + 4 < pos.size(); ++i)
        CHECK(k.acceleration[i] == Catch::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(derive_kinematics({Vec2{0, 0}}, dt));
}

TEST_CASE("kinematics: translation invariance") {
    Rng rng = Rng::seeded(11);
    std::vector<Vec2> pos;
    for (int i = 0; i < 20; ++i) pos.push_back({rng.uniform(0, 100), rng.uniform(0, 60)});
    auto base = derive_kinematics(pos, 0.04);
    std::vector<Vec2> shifted;
    for (auto& p : pos) shifted.push_back(p + Vec2{13.7, -4.2});
    auto moved = derive_kinematics(shifted, 0.04);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(moved.velocity[i].x == Catch::Approx(base.velocity[i].x).margin(1e-9));
        CHECK(moved.velocity[i].y == Catch::Approx(base.velocity[i].y).margin(1e-9));
        CHECK(moved.acceleration[i] == Catch::Approx(base.acceleration[i]).margin(1e-9));
    }
}

TEST_CASE("parse_tracking: static player over three frames") {
    auto path = temp_file("defcon_track_static.csv");
    write_file(path,
               "frame,time_s,entity_id,team_id,x_m,y_m,z_m\n"
               "0,0.00,ball,,50,34,0.1\n"
               "0,0.00,p1,home,30,20,\n"
               "1,0.04,ball,,50,34,0.1\n"
               "1,0.04,p1,home,30,20,\n"
               "2,0.08,ball,,50,34,0.1\n"
               "2,0.08,p1,home,30,20,\n");
    auto snaps = parse_tracking(path.string(), Pitch{});
    REQUIRE(snaps.size() == 3);
    for (const auto& s : snaps) {
        CHECK(s.players.at("p1").velocity.norm() == Catch::Approx(0.0).margin(1e-12));
        CHECK(s.ball.height == Catch::Approx(0.1));
    }
}

TEST_CASE("parse_tracking: one meter per frame at 25 Hz reads 25 m/s") {
    auto path = temp_file("defcon_track_fast.csv");
    std::string body = "frame,time_s,entity_id,team_id,x_m,y_m,z_m\n";
    for (int f = 0; f < 6; ++f) {
        body += std::to_string(f) + "," + std::to_string(f * 0.04) + ",ball,,50,34,0\n";
        body += std::to_string(f) + "," + std::to_string(f * 0.04) + ",p1,home," +
                std::to_string(10 + f) + ",20,\n";
    }
    write_file(path, body);
    auto snaps = parse_tracking(path.string(), Pitch{});
    CHECK(snaps[2].players.at("p1").speed == Catch::Approx(25.0).epsilon(1e-6));
}

TEST_CASE("parse_tracking: degenerate inputs") {
    auto empty = temp_file("defcon_track_empty.csv");
    write_file(empty, "");
    CHECK_THROWS(parse_tracking(empty.string(), Pitch{}));

    auto headeronly = temp_file("defcon_track_header.csv");
    write_file(headeronly, "frame,time_s,entity_id,team_id,x_m,y_m,z_m\n");
    CHECK_THROWS(parse_tracking(headeronly.string(), Pitch{}));

    auto noball = temp_file("defcon_track_noball.csv");
    write_file(noball,
               "frame,time_s,entity_id,team_id,x_m,y_m,z_m\n"
               "0,0.0,p1,home,30,20,\n");
    CHECK_THROWS_WITH(parse_tracking(noball.string(), Pitch{}),
                      Catch::Matchers::ContainsSubstring("ball"));
}

TEST_CASE("intended receiver: trivial cases") {
    Snapshot snap;
    snap.players["a"] = {{10, 0}, {}, 0, 0};
    CHECK(intended_receiver({0, 0}, {10, 0}, snap, {"a"}) == "a");

    snap.players["far"] = {{10, 10}, {}, 0, 0};
    CHECK(intended_receiver({0, 0}, {10, 0}, snap, {"a", "far"}) == "a");

    CHECK_THROWS(intended_receiver({0, 0}, {10, 0}, snap, {}));
}

TEST_CASE("intended receiver: ratio formula arithmetic") {
    // Dist/angle pairs (2 m, 0.1 rad) vs (1 m, 0.4 rad): the angular term
    // dominates and the first candidate wins 0.5 vs 0.25.
    auto score = [](double d, double ang, double min_d, double min_a) {
        return (min_d / std::max(d, kMinReceiverDist)) *
               (min_a / std::max(ang, kMinReceiverAngle));
    };
    const double rA = score(2.0, 0.1, 1.0, 0.1);
    const double rB = score(1.0, 0.4, 1.0, 0.1);
    CHECK(rA == Catch::Approx(0.5));
    CHECK(rB == Catch::Approx(0.25));
    CHECK(rA > rB);
}

TEST_CASE("intended receiver: matches brute-force score on random scenes") {
    Rng rng = Rng::seeded(42);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec2 passer{rng.uniform(0, 105), rng.uniform(0, 68)};
        const Vec2 endpoint{rng.uniform(0, 105), rng.uniform(0, 68)};
        Snapshot snap;
        std::vector<std::string> mates;
        for (int i = 0; i < 6; ++i) {
            std::string id = "m" + std::to_string(i);
            snap.players[id] = {{rng.uniform(0, 105), rng.uniform(0, 68)}, {}, 0, 0};
            mates.push_back(id);
        }
        const std::string got = intended_receiver(passer, endpoint, snap, mates);

        double min_d = 1e18, min_a = 1e18;
        for (const auto& id : mates) {
            const Vec2 p = snap.players[id].position;
            min_d = std::min(min_d, std::max(distance(p, endpoint), kMinReceiverDist));
            min_a = std::min(min_a, std::max(angle_between(endpoint - passer, p - passer),
                                             kMinReceiverAngle));
        }
        std::string best;
        double best_score = -1;
        for (const auto& id : mates) {
            const Vec2 p = snap.players[id].position;
            const double d = std::max(distance(p, endpoint), kMinReceiverDist);
            const double a =
                std::max(angle_between(endpoint - passer, p - passer), kMinReceiverAngle);
            const double s = (min_d / d) * (min_a / a);
            if (s > best_score) {
                best_score = s;
                best = id;
            }
        }
        CHECK(got == best);
    }
}

namespace {

std::vector<PlayerIdentity> two_team_lineup() {
    std::vector<PlayerIdentity> players;
    for (int i = 0; i < 3; ++i)
        players.push_back({"h" + std::to_string(i), "home", i == 0, PositionGroup::Other, ""});
    for (int i = 0; i < 3; ++i)
        players.push_back({"a" + std::to_string(i), "away", i == 0, PositionGroup::Other, ""});
    return players;
}

Snapshot simple_snapshot(std::int64_t frame) {
    Snapshot s;
    s.frame = frame;
    s.time = frame * 0.04;
    s.players["h0"] = {{5, 34}, {}, 0, 0};
    s.players["h1"] = {{40, 30}, {}, 0, 0};
    s.players["h2"] = {{60, 40}, {}, 0, 0};
    s.players["a0"] = {{100, 34}, {}, 0, 0};
    s.players["a1"] = {{50, 20}, {}, 0, 0};
    s.players["a2"] = {{70, 30}, {}, 0, 0};
    s.ball = {{40, 30}, 0.0};
    return s;
}

EventRecord make_event(std::int64_t index, ActionType type, const std::string& team,
                       const std::string& actor, Outcome outcome) {
    EventRecord e;
    e.index = index;
    e.action_type = type;
    e.team_id = team;
    e.actor_id = actor;
    e.frame = index;
    e.outcome = outcome;
    return e;
}

}  // namespace

TEST_CASE("build_action_instances: return labels over the ten-event window") {
    auto players = two_team_lineup();
    std::vector<Snapshot> snaps;
    for (int f = 0; f < 20; ++f) snaps.push_back(simple_snapshot(f));

    SECTION("goal on the event itself") {
        auto shot = make_event(0, ActionType::Shot, "home", "h1", Outcome::Success);
        shot.shot_flags = ShotFlags{false, true, true};
        auto insts = build_action_instances({shot}, snaps, players);
        REQUIRE(insts.size() == 1);
        CHECK(insts[0].return_G == 1);
        CHECK(insts[0].outcome_O == 1);
        CHECK(insts[0].intended_receiver_id == kGoalToken);
    }

    SECTION("no goal anywhere") {
        std::vector<EventRecord> events;
        for (int i = 0; i < 8; ++i) {
            auto e = make_event(i, ActionType::Pass, "home", "h1", Outcome::Success);
            e.receiver_id = "h2";
            events.push_back(e);
        }
        for (const auto& inst : build_action_instances(events, snaps, players))
            CHECK(inst.return_G == 0);
    }

    SECTION("opponent scores three events later") {
        std::vector<EventRecord> events;
        auto e0 = make_event(0, ActionType::Pass, "home", "h1", Outcome::Success);
        e0.receiver_id = "h2";
        events.push_back(e0);
        for (int i = 1; i <= 2; ++i) {
            auto e = make_event(i, ActionType::Pass, "away", "a1", Outcome::Success);
            e.receiver_id = "a2";
            events.push_back(e);
        }
        auto goal = make_event(3, ActionType::Shot, "away", "a2", Outcome::Success);
        goal.shot_flags = ShotFlags{false, true, true};
        events.push_back(goal);
        auto insts = build_action_instances(events, snaps, players);
        CHECK(insts[0].return_G == -1);
        CHECK(insts[3].return_G == 1);
    }

    SECTION("labels invariant to events beyond the horizon") {
        std::vector<EventRecord> events;
        for (int i = 0; i < 12; ++i) {
            auto e = make_event(i, ActionType::Pass, "home", "h1", Outcome::Success);
            e.receiver_id = "h2";
            events.push_back(e);
        }
        auto goal = make_event(12, ActionType::Shot, "home", "h1", Outcome::Success);
        goal.shot_flags = ShotFlags{false, true, true};
        events.push_back(goal);
        auto insts = build_action_instances(events, snaps, players);
        CHECK(insts[0].return_G == 0);   // 12 steps ahead, outside the window
        CHECK(insts[2].return_G == 1);   // exactly at the horizon edge
        auto truncated = build_action_instances(
            std::vector<EventRecord>(events.begin(), events.begin() + 11), snaps, players);
        CHECK(truncated[0].return_G == insts[0].return_G);
    }

    SECTION("missing frame is reported with the event index") {
        auto e = make_event(99, ActionType::Pass, "home", "h1", Outcome::Success);
        e.frame = 999;
        CHECK_THROWS_WITH(build_action_instances({e}, snaps, players),
                          Catch::Matchers::ContainsSubstring("99"));
    }
}

TEST_CASE("build_action_instances: failed pass gets a teammate as intended receiver") {
    auto players = two_team_lineup();
    std::vector<Snapshot> snaps;
    for (int f = 0; f < 4; ++f) snaps.push_back(simple_snapshot(f));
    snaps[1].ball.position = {60, 40};  // trajectory ends near h2

    auto fail = make_event(0, ActionType::Pass, "home", "h1", Outcome::Fail);
    fail.failure_cause = FailureCause::DefensiveAction;
    fail.interceptor_id = "a2";
    auto next = make_event(1, ActionType::Pass, "away", "a2", Outcome::Success);
    next.receiver_id = "a1";

    auto insts = build_action_instances({fail, next}, snaps, players);
    CHECK(insts[0].outcome_O == 0);
    CHECK(insts[0].intended_receiver_id == "h2");
    // receiver is always a teammate of the actor
    CHECK(insts[0].intended_receiver_id.front() == 'h');
}

TEST_CASE("events JSONL round trip") {
    auto path = temp_file("defcon_events.jsonl");
    EventRecord e = make_event(7, ActionType::Shot, "home", "h1", Outcome::Fail);
    e.shot_flags = ShotFlags{true, false, false};
    e.interceptor_id = "a2";
    std::ofstream out(path);
    out << event_to_json(e).dump() << "\n";
    out.close();
    auto parsed = parse_events(path.string());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].index == 7);
    CHECK(parsed[0].action_type == ActionType::Shot);
    CHECK(parsed[0].shot_flags->blocked);
    CHECK(parsed[0].interceptor_id.value() == "a2");
    // unknown fields are ignored
    auto path2 = temp_file("defcon_events2.jsonl");
    write_file(path2, R"({"index":1,"action_type":"pass","team_id":"t","actor_id":"p",)"
                      R"("frame":3,"outcome":"success","mystery":42})"
                      "\n");
    CHECK(parse_events(path2.string()).size() == 1);
}
