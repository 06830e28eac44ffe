#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrtravel/errors.hpp"
#include "vrtravel/metrics.hpp"
#include "vrtravel/rng.hpp"

using namespace vrtravel;

namespace {

EventRecord rec(std::uint64_t tick, EventKind kind, std::optional<double> d = std::nullopt,
                LoggedMode mode = LoggedMode::nm, TechniqueId tech = TechniqueId::outstanding) {
    EventRecord r;
    r.tick = tick;
    r.sim_time = static_cast<double>(tick) / 30.0;
    r.kind = kind;
    r.distance = d;
    r.mode = mode;
    r.technique = tech;
    return r;
}

}  // namespace

TEST(DistanceBucket, Examples) {
    EXPECT_EQ(distance_bucket(1.5), DistanceBucket::near);
    EXPECT_EQ(distance_bucket(2.0), DistanceBucket::near);
    EXPECT_EQ(distance_bucket(300.0), DistanceBucket::far);
    EXPECT_EQ(distance_bucket(0.0), DistanceBucket::near);
    EXPECT_EQ(to_string(DistanceBucket::far), "long");
}

TEST(DistanceBucket, Boundaries) {
    const double eps = 1e-9;
    EXPECT_EQ(distance_bucket(2.0 - eps), DistanceBucket::near);
    EXPECT_EQ(distance_bucket(2.0 + eps), DistanceBucket::medium);
    EXPECT_EQ(distance_bucket(40.0 - eps), DistanceBucket::medium);
    EXPECT_EQ(distance_bucket(40.0), DistanceBucket::medium);
    EXPECT_EQ(distance_bucket(40.0 + eps), DistanceBucket::far);
    EXPECT_EQ(distance_bucket(std::nextafter(2.0, 3.0)), DistanceBucket::medium);
    EXPECT_EQ(distance_bucket(std::nextafter(40.0, 41.0)), DistanceBucket::far);
}

TEST(DistanceBucket, NegativeIsDomainError) {
    EXPECT_THROW(distance_bucket(-0.001), DomainError);
    EXPECT_THROW(distance_bucket(std::nan("")), DomainError);
}

TEST(NormalizedFlow, Examples) {
    EXPECT_NEAR(normalized_flow(4.0, 1.0), 2.3529411764705883, 1e-12);
    EXPECT_NEAR(normalized_flow(40.0, 10.0), 2.3529411764705883, 1e-12);
    EXPECT_EQ(normalized_flow(0.0, 5.0), 0.0);
    EXPECT_THROW(normalized_flow(1.0, 0.5), DomainError);
}

TEST(NormalizedFlow, ScaleInvariance) {
    for (double v : {1.0, 4.0, 9.0}) {
        const double ref = normalized_flow(v, 1.0);
        for (double s : {1.0, 5.0, 10.0, 20.0}) EXPECT_NEAR(normalized_flow(v * s, s), ref, 1e-12);
    }
}

TEST(EventLog, AppendRejectsBadRecords) {
    EventLog log;
    log.append(rec(5, EventKind::move, 0.1));
    EXPECT_THROW(log.append(rec(4, EventKind::move, 0.1)), DomainError);
    EXPECT_THROW(log.append(rec(6, EventKind::aim)), DomainError);
    EXPECT_THROW(log.append(rec(6, EventKind::aim, -1.0)), DomainError);
    EXPECT_EQ(log.size(), 1u);
}

TEST(EventLog, JsonlRoundTripWithVersion) {
    EventLog log;
    log.append(rec(0, EventKind::move, 0.04));
    log.append(rec(3, EventKind::mode_switch, std::nullopt, LoggedMode::tm));
    log.append(rec(20, EventKind::aim, 300.0, LoggedMode::tm));
    EventRecord end = rec(40, EventKind::session_end, 123.5);
    end.peak_flow = 2.5;
    log.append(end);
    const std::string text = log.to_jsonl();
    EXPECT_NE(text.find("\"v\":1"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    EXPECT_TRUE(EventLog::from_jsonl(text) == log);
    EXPECT_EQ(EventLog::from_jsonl(text).to_jsonl(), text);
}

TEST(EventLog, ParseErrorCarriesRecordIndex) {
    EventLog log;
    log.append(rec(0, EventKind::move, 0.04));
    log.append(rec(1, EventKind::move, 0.04));
    std::string text = log.to_jsonl() + "{\"v\":1,\"tick\":2,\"kind\":\"teleport!\"}\n";
    try {
        EventLog::from_jsonl(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.index(), 2u);
    }
    try {
        EventLog::from_jsonl("{\"v\":1,\"tick\":0,\"time\":0,\"kind\":\"aim\",\"mode\":\"NM\",\"technique\":\"teleport\"}\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.index(), 0u);
    }
    EXPECT_THROW(EventLog::from_jsonl("not json\n"), ParseError);
}

TEST(Summarize, EmptyLogIsZero) { EXPECT_TRUE(summarize(EventLog{}, 30.0) == SessionReport{}); }

TEST(Summarize, OneLongTravelAim) {
    EventLog log;
    log.append(rec(10, EventKind::aim, 300.0, LoggedMode::tm));
    const SessionReport r = summarize(log, 30.0);
    EXPECT_EQ(r.aims, 1u);
    EXPECT_EQ(r.aims_far, 1u);
    EXPECT_EQ(r.aims_medium, 0u);
}

TEST(Summarize, FiveTeleportCommits) {
    EventLog log;
    for (int i = 0; i < 5; ++i) {
        log.append(rec(10 * i + 5, EventKind::aim, 40.0, LoggedMode::nm, TechniqueId::teleport));
        log.append(rec(10 * i + 5, EventKind::relocation, 40.0, LoggedMode::nm, TechniqueId::teleport));
    }
    const SessionReport r = summarize(log, 30.0);
    EXPECT_EQ(r.aims, 5u);
    EXPECT_EQ(r.aims_medium, 5u);
    EXPECT_EQ(r.relocations, 5u);
}

TEST(Summarize, ModeTimesAndWalkSplit) {
    EventLog log;
    log.append(rec(0, EventKind::move, 0.5, LoggedMode::nm));
    log.append(rec(30, EventKind::mode_switch, std::nullopt, LoggedMode::tm));
    log.append(rec(31, EventKind::move, 0.25, LoggedMode::tm));
    log.append(rec(90, EventKind::mode_switch, std::nullopt, LoggedMode::nm));
    EventRecord end = rec(120, EventKind::session_end, 77.0);
    end.peak_flow = 3.0;
    log.append(end);
    const SessionReport r = summarize(log, 30.0);
    EXPECT_DOUBLE_EQ(r.playtime, 4.0);
    EXPECT_DOUBLE_EQ(r.tm_time, 2.0);
    EXPECT_DOUBLE_EQ(r.nm_time, 2.0);
    EXPECT_DOUBLE_EQ(r.nm_time + r.tm_time, r.playtime);
    EXPECT_DOUBLE_EQ(r.real_walk_nm, 0.5);
    EXPECT_DOUBLE_EQ(r.real_walk_tm, 0.25);
    EXPECT_DOUBLE_EQ(r.real_walk, 0.75);
    EXPECT_EQ(r.mode_switches, 2u);
    EXPECT_DOUBLE_EQ(r.avatar_virtual, 77.0);
    EXPECT_DOUBLE_EQ(r.peak_flow, 3.0);
}

TEST(Summarize, OpenTmRunsToTheEnd) {
    EventLog log;
    log.append(rec(30, EventKind::mode_switch, std::nullopt, LoggedMode::tm));
    log.append(rec(59, EventKind::move, 0.0, LoggedMode::tm));
    const SessionReport r = summarize(log, 30.0);
    EXPECT_DOUBLE_EQ(r.playtime, 2.0);
    EXPECT_DOUBLE_EQ(r.tm_time, 1.0);
}

TEST(Summarize, BucketsPartitionAims) {
    Rng rng(17);
    EventLog log;
    for (int i = 0; i < 500; ++i) log.append(rec(static_cast<std::uint64_t>(i), EventKind::aim, rng.uniform(0, 100)));
    const SessionReport r = summarize(log, 30.0);
    EXPECT_EQ(r.aims_near + r.aims_medium + r.aims_far, r.aims);
    EXPECT_EQ(r.aims, 500u);
}

TEST(Summarize, OrderWithinATickDoesNotMatter) {
    Rng rng(23);
    std::vector<EventRecord> recs;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const int n = static_cast<int>(rng.uniform_int(0, 4));
        for (int k = 0; k < n; ++k) {
            const auto kind = static_cast<int>(rng.uniform_int(0, 3));
            if (kind == 0) recs.push_back(rec(t, EventKind::aim, rng.uniform(0, 80)));
            if (kind == 1) recs.push_back(rec(t, EventKind::relocation, rng.uniform(0, 40)));
            if (kind == 2) recs.push_back(rec(t, EventKind::arrival, rng.uniform(0, 400)));
            if (kind == 3) recs.push_back(rec(t, EventKind::move, rng.uniform(0, 0.1)));
        }
    }
    EventLog a;
    for (const auto& r : recs) a.append(r);
    const SessionReport base = summarize(a, 30.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EventRecord> shuffled = recs;
        for (std::size_t lo = 0; lo < shuffled.size();) {
            std::size_t hi = lo;
            while (hi < shuffled.size() && shuffled[hi].tick == shuffled[lo].tick) ++hi;
            for (std::size_t i = hi - 1; i > lo; --i)
                std::swap(shuffled[i], shuffled[lo + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - lo)))]);
            lo = hi;
        }
        EventLog b;
        for (const auto& r : shuffled) b.append(r);
        const SessionReport s = summarize(b, 30.0);
        EXPECT_EQ(s.aims, base.aims);
        EXPECT_EQ(s.aims_near, base.aims_near);
        EXPECT_EQ(s.aims_medium, base.aims_medium);
        EXPECT_EQ(s.aims_far, base.aims_far);
        EXPECT_EQ(s.relocations, base.relocations);
        EXPECT_EQ(s.arrivals, base.arrivals);
        EXPECT_NEAR(s.real_walk, base.real_walk, 1e-9);
        EXPECT_EQ(s.playtime, base.playtime);
    }
}

TEST(ReportCsv, HeaderMatchesFieldCount) {
    const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    EXPECT_EQ(commas(report_csv_header()), commas(report_csv_fields(SessionReport{})));
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(540.0), "540");
}
