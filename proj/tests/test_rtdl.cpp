#include <doctest.h>

#include <array>
#include <map>

#include "actsim/error.hpp"
#include "actsim/rtdl.hpp"

using namespace actsim;

TEST_CASE("frame wire format") {
    const RtdlFrame f{rtdl_addr::RingRevolutionPeriod, 945'390};
    const auto bytes = encode_frame(f);
    // 945390 = 0x0E6CEE; checksum 0x02 ^ 0x0E ^ 0x6C ^ 0xEE = 0x8E.
    const std::array<std::uint8_t, 6> expect{0x7E, 0x02, 0x0E, 0x6C, 0xEE, 0x8E};
    CHECK(bytes == expect);
    CHECK(decode_frame(bytes) == f);
}

TEST_CASE("frame codec round trip and failure modes") {
    for (std::uint32_t data : {0u, 1u, 0xFFFFFFu, 945'390u, 0x123456u}) {
        const RtdlFrame f{rtdl_addr::DaqMode, data};
        CHECK(decode_frame(encode_frame(f)) == f);
    }
    CHECK_THROWS_AS(encode_frame(RtdlFrame{0x01, 1u << 24}), EncodingError);

    auto bytes = encode_frame(RtdlFrame{0x03, 42});
    bytes[0] = 0x7F;  // bad sync
    CHECK_THROWS_AS(decode_frame(bytes), EncodingError);
    bytes = encode_frame(RtdlFrame{0x03, 42});
    bytes[4] ^= 0x01;  // data corrupted, checksum now wrong
    CHECK_THROWS_AS(decode_frame(bytes), EncodingError);
    const std::array<std::uint8_t, 3> shorty{0x7E, 0x03, 0x00};
    CHECK_THROWS_AS(decode_frame(shorty), EncodingError);
}

TEST_CASE("every single-byte corruption of a frame is detected") {
    const auto clean = encode_frame(RtdlFrame{rtdl_addr::GridPhaseDiff, 0x00ABCD});
    for (int byte = 0; byte < kRtdlFrameBytes; ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            auto bytes = clean;
            bytes[byte] ^= (1u << bit);
            CHECK_THROWS_AS(decode_frame(bytes), EncodingError);
        }
    }
}

TEST_CASE("default registry carries the facility frame set") {
    const FrameRegistry reg = FrameRegistry::defaults();
    CHECK(reg.size() == 11);
    CHECK(reg.contains(rtdl_addr::TodSecondsHi));
    CHECK(reg.contains(rtdl_addr::TodSecondsLo));
    CHECK(reg.contains(rtdl_addr::IocResetAddress));
    CHECK_FALSE(reg.contains(0x55));
    CHECK_THROWS_AS(reg.name(0x55), ConfigError);
    CHECK(default_encoder_addresses().size() == reg.size());
}

TEST_CASE("encoder list validation") {
    const FrameRegistry reg = FrameRegistry::defaults();
    CHECK_NOTHROW(EncoderList(default_encoder_addresses(), reg));
    CHECK_THROWS_AS(EncoderList({0x01, 0x55}, reg), ConfigError);
    CHECK_THROWS_AS(EncoderList({0x01, 0x02, 0x01}, reg), ConfigError);
}

TEST_CASE("broadcast duration at the nominal bitrate") {
    // 48 bits per frame at 10 Mb/s: 4.8 us per frame, 52.8 us for all eleven.
    CHECK(broadcast_duration_ps(1, 10'000'000) == 4'800'000);
    CHECK(broadcast_duration_ps(11, 10'000'000) == 52'800'000);
    CHECK_THROWS_AS(broadcast_duration_ps(1, 0), ConfigError);
}

TEST_CASE("broadcast lays frames back to back before the deadline") {
    const FrameRegistry reg = FrameRegistry::defaults();
    const EncoderList list(default_encoder_addresses(), reg);
    std::map<std::uint8_t, std::uint32_t> values;
    for (std::uint8_t a : list.addresses()) values[a] = a * 3u;
    const SimTime at{1'000'000};
    const SimTime deadline = at + 100 * kPsPerUs;
    const auto frames = broadcast_cycle(reg, list, values, at, deadline, 10'000'000);
    REQUIRE(frames.size() == 11);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CHECK(frames[i].at == at + static_cast<std::int64_t>(i + 1) * 4'800'000);
        CHECK(frames[i].frame.address == list.addresses()[i]);
        CHECK(frames[i].frame.data == list.addresses()[i] * 3u);
    }
    CHECK(frames.back().at < deadline);
}

TEST_CASE("broadcast overrun names the required lead") {
    const FrameRegistry reg = FrameRegistry::defaults();
    const EncoderList list(default_encoder_addresses(), reg);
    std::map<std::uint8_t, std::uint32_t> values;
    for (std::uint8_t a : list.addresses()) values[a] = 0;
    const SimTime at{0};
    try {
        broadcast_cycle(reg, list, values, at, at + 40 * kPsPerUs, 10'000'000);
        FAIL("expected SchedulingError");
    } catch (const SchedulingError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("52800000") != std::string::npos);
    }
    CHECK_THROWS_AS(broadcast_cycle(reg, list, values, at, at, 10'000'000), SchedulingError);

    values.erase(rtdl_addr::RfGates);
    CHECK_THROWS_AS(broadcast_cycle(reg, list, values, at, at + kPsPerSec, 10'000'000),
                    ConfigError);
}

TEST_CASE("time-of-day split across two frames") {
    const std::uint32_t t = 0xDEADBEEF;
    CHECK(tod_hi(t) == 0xDEAD);
    CHECK(tod_lo(t) == 0xBEEF);
    CHECK(tod_join(tod_hi(t), tod_lo(t)) == t);
    CHECK(tod_hi(t) < (1u << 24));  // each half fits one 24-bit frame
}

TEST_CASE("timestamps count carrier ticks since cycle start") {
    TimestampContext ctx;
    CHECK_THROWS_AS(timestamp_now(ctx, SimTime{0}), StateError);
    ctx.have_reference = true;
    ctx.tod_seconds = 1'700'000'000;
    ctx.cycle_index = 42;
    ctx.t_cycle_start = SimTime{1'000'000};
    ctx.ring_period_ps = 945'390;  // tick = 59086.875 ps

    Timestamp ts = timestamp_now(ctx, ctx.t_cycle_start);
    CHECK(ts.tod_seconds == 1'700'000'000);
    CHECK(ts.cycle_index == 42);
    CHECK(ts.fraction_ticks == 0);
    CHECK(timestamp_now(ctx, ctx.t_cycle_start + 59'086).fraction_ticks == 0);
    CHECK(timestamp_now(ctx, ctx.t_cycle_start + 59'087).fraction_ticks == 1);
    CHECK(timestamp_now(ctx, ctx.t_cycle_start + 945'390).fraction_ticks == 16);
    CHECK(timestamp_now(ctx, ctx.t_cycle_start - 1).fraction_ticks == -1);  // floor

    // Later instants in the same cycle never decrease.
    std::int64_t prev = -100;
    for (std::int64_t dt = 0; dt < 2'000'000; dt += 37'123) {
        const std::int64_t f = timestamp_now(ctx, ctx.t_cycle_start + dt).fraction_ticks;
        CHECK(f >= prev);
        prev = f;
    }
}
