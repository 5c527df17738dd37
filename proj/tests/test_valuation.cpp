#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include <defcon/credit.hpp>
#include <defcon/epv.hpp>

using namespace defcon;

namespace {

double total(const std::vector<CreditAllocation>& allocs) {
    double s = 0.0;
    for (const auto& a : allocs) s += a.credit;
    return s;
}

std::map<std::string, double> by_player(const std::vector<CreditAllocation>& allocs) {
    std::map<std::string, double> out;
    for (const auto& a : allocs) out[a.player_id] += a.credit;
    return out;
}

// Random responsibility map over `n` defenders summing to one.
std::map<std::string, double> random_w(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::map<std::string, double> w;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (w["d" + std::to_string(i)] = u(rng));
    for (auto& [k, v] : w) v /= s;
    return w;
}

}  // namespace

TEST_CASE("team defensive value matches the turnover fixture") {
    // epv_k = 0.0032, opponent EPV after the turnover 0.0158 -> D = 0.0190
    const double D = team_defensive_value(0.0032, 0.0158, true, false);
    CHECK(std::abs(D - 0.0190) < 1e-12);

    CHECK(team_defensive_value(0.2, 0.3, false, false) == Catch::Approx(-0.1));
    CHECK(team_defensive_value(0.2, 0.0, false, true) == Catch::Approx(-0.8));
    CHECK(team_defensive_value(-0.1, 0.4, true, false) == Catch::Approx(0.3));
}

TEST_CASE("interception credits reproduce the worked example") {
    // p = 0.548, D = 0.0190, responsibilities 0.210 / 0.467 / 0.168 with the
    // remainder on a fourth defender; the interceptor holds w = 0.210.
    std::map<std::string, double> w = {
        {"v1", 0.210}, {"v2", 0.467}, {"v3", 0.168}, {"v4", 0.155}};
    const auto allocs = allocate_pass_fail_defensive_action(7, 0.0190, 0.548, w, "v1");
    const auto per = by_player(allocs);
    CHECK(std::abs(per.at("v1") - 0.012216) < 1e-6);
    CHECK(std::abs(per.at("v2") - 0.004011) < 1e-6);
    CHECK(std::abs(per.at("v3") - 0.001443) < 1e-6);
    CHECK(total(allocs) == Catch::Approx(0.0190).margin(1e-12));
    // category split: one intercept row, disturb rows for everyone
    int intercepts = 0;
    for (const auto& a : allocs)
        if (a.category == CreditCategory::Intercept) {
            ++intercepts;
            CHECK(a.player_id == "v1");
            CHECK(a.credit == Catch::Approx(0.548 * 0.0190));
        }
    CHECK(intercepts == 1);
}

TEST_CASE("unblocked shot fixtures") {
    std::map<std::string, double> w = {{"d0", 0.25}, {"d1", 0.25}, {"d2", 0.25}, {"d3", 0.25}};

    SECTION("outfield shared penalty = epv - U = -0.097") {
        const auto allocs =
            allocate_shot_unblocked(3, 0.024, 0.121, w, false, 0.0, false, "gk");
        CHECK(std::abs(total(allocs) - (-0.097)) < 1e-9);
        for (const auto& a : allocs) CHECK(a.category == CreditCategory::Concede);
    }
    SECTION("goalkeeper save credit = U - next EPV = +0.069") {
        const auto allocs = allocate_shot_unblocked(3, 0.035, 0.069, w, true, 0.0, false, "gk");
        double gk = 0.0;
        for (const auto& a : allocs)
            if (a.player_id == "gk") gk += a.credit;
        CHECK(std::abs(gk - 0.069) < 1e-9);
    }
    SECTION("conceded goal puts U - 1 on the goalkeeper") {
        const double U = 0.41;
        const auto allocs = allocate_shot_unblocked(3, 0.2, U, w, true, 0.0, true, "gk");
        double gk = 0.0;
        for (const auto& a : allocs)
            if (a.player_id == "gk") gk += a.credit;
        CHECK(std::abs(gk - (U - 1.0)) < 1e-9);
    }
    SECTION("goalkeeper in the responsibility map still gets no outfield share") {
        auto w2 = w;
        w2["gk"] = 0.0;
        const auto allocs = allocate_shot_unblocked(3, 0.1, 0.3, w2, false, 0.0, false, "gk");
        for (const auto& a : allocs) CHECK(a.player_id != "gk");
    }
}

TEST_CASE("penalty foul rule") {
    const double epv_k = 0.031;
    const auto allocs = allocate_foul(5, epv_k, kPenaltyEpv, "d7");
    REQUIRE(allocs.size() == 1);
    CHECK(allocs[0].player_id == "d7");
    CHECK(allocs[0].credit == Catch::Approx(epv_k - 0.7884).margin(1e-12));
    CHECK(allocs[0].category == CreditCategory::Concede);
}

TEST_CASE("conservation across randomized component values", "[conservation]") {
    std::mt19937 rng(20260823);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::uniform_real_distribution<double> dd(-0.5, 0.5);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + static_cast<int>(ud(rng) * 9);
        const auto w = random_w(rng, n);
        const double D = dd(rng);

        // Eq. 6: interceptor + positional shares
        {
            const auto a = allocate_pass_fail_defensive_action(trial, std::abs(D), ud(rng), w,
                                                               w.begin()->first);
            CHECK(std::abs(total(a) - std::abs(D)) < 1e-9);
        }
        // Eq. 7
        CHECK(std::abs(total(allocate_pass_fail_no_action(trial, D, w)) - D) < 1e-9);
        // Eq. 8
        {
            const double neg = -std::abs(D) - 1e-6;
            CHECK(std::abs(total(allocate_pass_success_epv_up(trial, neg, w)) - neg) < 1e-9);
        }
        // foul: single allocation equal to the swing
        {
            const auto a = allocate_foul(trial, D, dd(rng), "d0");
            REQUIRE(a.size() == 1);
        }
        // blocked shot
        {
            const auto a =
                allocate_shot_blocked(trial, std::abs(D), ud(rng), w, w.begin()->first);
            CHECK(std::abs(total(a) - std::abs(D)) < 1e-9);
        }
    }
}

namespace {

// Independent brute-force of the Eq. 9-12 gap-share rule for comparison.
std::map<std::string, double> naive_epv_down(double D, const ComponentValues& cv) {
    const auto bd = epv(cv);
    std::map<std::string, double> totals;
    if (D == 0.0) return totals;
    double gap_sum = 0.0;
    for (std::size_t a = 0; a < cv.options.size(); ++a)
        if (cv.options[a].e1 > bd.epv)
            gap_sum += std::max(0.0, cv.options[a].e1 - bd.action_epv[a]);
    if (gap_sum > 0.0) {
        for (std::size_t a = 0; a < cv.options.size(); ++a) {
            if (!(cv.options[a].e1 > bd.epv)) continue;
            const double gap = std::max(0.0, cv.options[a].e1 - bd.action_epv[a]);
            if (gap <= 0.0) continue;
            for (const auto& [v, wv] : cv.options[a].w) totals[v] += wv * D * gap / gap_sum;
        }
    } else {
        for (const auto& [v, wv] : cv.options[cv.executed].w) totals[v] += wv * D;
    }
    return totals;
}

ComponentValues random_component_values(std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> ue(-0.3, 0.6);
    ComponentValues cv;
    const int n_opts = 2 + static_cast<int>(u01(rng) * 5);
    double pi_sum = 0.0;
    for (int a = 0; a < n_opts; ++a) {
        OptionValue o;
        o.receiver_id = "r" + std::to_string(a);
        o.pi = 0.05 + u01(rng);
        pi_sum += o.pi;
        o.p = u01(rng);
        o.e1 = ue(rng);
        o.e0 = ue(rng) * 0.3;
        o.w = random_w(rng, 3 + static_cast<int>(u01(rng) * 5));
        cv.options.push_back(std::move(o));
    }
    for (auto& o : cv.options) o.pi /= pi_sum;
    cv.executed = static_cast<int>(u01(rng) * n_opts);
    return cv;
}

}  // namespace

TEST_CASE("gap-share allocation matches a naive re-implementation") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const auto cv = random_component_values(rng);
        const auto bd = epv(cv);
        const double D = trial % 7 == 0 ? 0.0 : 0.05 + 0.2 * (trial % 5) / 5.0;
        const auto engine = by_player(allocate_pass_success_epv_down(1, D, cv, bd));
        const auto naive = naive_epv_down(D, cv);
        REQUIRE(engine.size() == naive.size());
        for (const auto& [id, credit] : naive)
            CHECK(std::abs(engine.at(id) - credit) < 1e-9);
        // conservation
        CHECK(std::abs(total(allocate_pass_success_epv_down(1, D, cv, bd)) - D) < 1e-9);
    }
}

TEST_CASE("EPV mixture follows Eq. 1-2") {
    ComponentValues cv;
    OptionValue a;
    a.pi = 0.6;
    a.p = 0.7;
    a.e1 = 0.2;
    a.e0 = -0.1;
    OptionValue b;
    b.pi = 0.4;
    b.p = 0.2;
    b.e1 = 0.5;
    b.e0 = 0.0;
    cv.options = {a, b};
    const auto bd = epv(cv);
    CHECK(bd.action_epv[0] == Catch::Approx(0.7 * 0.2 + 0.3 * -0.1));
    CHECK(bd.action_epv[1] == Catch::Approx(0.2 * 0.5));
    CHECK(bd.epv == Catch::Approx(0.6 * bd.action_epv[0] + 0.4 * bd.action_epv[1]));
    // A+ membership: E1 > epv
    CHECK(bool(bd.threatening[0] == (0.2 > bd.epv)));
    CHECK(bool(bd.threatening[1] == (0.5 > bd.epv)));
}

TEST_CASE("allocation preconditions are enforced") {
    std::map<std::string, double> w = {{"d0", 0.5}, {"d1", 0.5}};
    CHECK_THROWS(allocate_pass_fail_defensive_action(0, 0.1, 0.5, w, "not_a_defender"));
    CHECK_THROWS(allocate_pass_success_epv_up(0, 0.1, w));
    CHECK_THROWS(allocate_shot_blocked(0, 0.1, 0.5, w, "goalkeeper_not_listed"));
    ComponentValues cv;
    OptionValue o;
    o.e1 = 1.0;
    o.w = w;
    cv.options = {o};
    cv.executed = -1;
    const auto bd = epv(cv);
    CHECK_THROWS(allocate_pass_success_epv_down(0, -0.1, cv, bd));
}
