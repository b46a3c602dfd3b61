#include "actsim/rtdl.hpp"

#include <sstream>

#include "actsim/error.hpp"

namespace actsim {

FrameRegistry FrameRegistry::defaults() {
    FrameRegistry r;
    r.define(rtdl_addr::TodSecondsHi, "time-of-day seconds (hi 16)");
    r.define(rtdl_addr::TodSecondsLo, "time-of-day seconds (lo 16)");
    r.define(rtdl_addr::RingRevolutionPeriod, "ring revolution period (ps)");
    r.define(rtdl_addr::OperatingMode, "operating mode");
    r.define(rtdl_addr::GridPhaseDiff, "60 Hz phase difference (0.1 us, signed)");
    r.define(rtdl_addr::LebtChopperParams, "LEBT chopper beam parameters");
    r.define(rtdl_addr::PreviousPulseData, "previous beam pulse data");
    r.define(rtdl_addr::DaqMode, "data acquisition mode");
    r.define(rtdl_addr::BeamProfileId, "beam profile ID");
    r.define(rtdl_addr::RfGates, "transmitter / RF gates on-off mask");
    r.define(rtdl_addr::IocResetAddress, "IOC reset address");
    return r;
}

void FrameRegistry::define(std::uint8_t address, std::string name) {
    names_[address] = std::move(name);
}

bool FrameRegistry::contains(std::uint8_t address) const { return names_.count(address) > 0; }

const std::string& FrameRegistry::name(std::uint8_t address) const {
    auto it = names_.find(address);
    if (it == names_.end()) {
        std::ostringstream os;
        os << "RTDL address 0x" << std::hex << static_cast<int>(address) << " is not registered";
        throw ConfigError(os.str());
    }
    return it->second;
}

EncoderList::EncoderList(std::vector<std::uint8_t> addresses, const FrameRegistry& reg)
    : addresses_(std::move(addresses)) {
    std::array<bool, 256> seen{};
    for (std::uint8_t a : addresses_) {
        if (!reg.contains(a)) {
            std::ostringstream os;
            os << "encoder list contains unregistered address 0x" << std::hex
               << static_cast<int>(a);
            throw ConfigError(os.str());
        }
        if (seen[a]) {
            std::ostringstream os;
            os << "encoder list contains duplicate address 0x" << std::hex << static_cast<int>(a);
            throw ConfigError(os.str());
        }
        seen[a] = true;
    }
}

std::array<std::uint8_t, kRtdlFrameBytes> encode_frame(const RtdlFrame& f) {
    if (f.data >= (1u << 24)) {
        std::ostringstream os;
        os << "RTDL data " << f.data << " does not fit in 24 bits";
        throw EncodingError(os.str());
    }
    const auto hi = static_cast<std::uint8_t>((f.data >> 16) & 0xFF);
    const auto mid = static_cast<std::uint8_t>((f.data >> 8) & 0xFF);
    const auto lo = static_cast<std::uint8_t>(f.data & 0xFF);
    const std::uint8_t chk = static_cast<std::uint8_t>(f.address ^ hi ^ mid ^ lo);
    return {kRtdlSync, f.address, hi, mid, lo, chk};
}

RtdlFrame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kRtdlFrameBytes) {
        std::ostringstream os;
        os << "RTDL framing error: " << bytes.size() << " bytes, need " << kRtdlFrameBytes;
        throw EncodingError(os.str());
    }
    if (bytes[0] != kRtdlSync) {
        std::ostringstream os;
        os << "RTDL framing error: bad sync byte 0x" << std::hex << static_cast<int>(bytes[0]);
        throw EncodingError(os.str());
    }
    const std::uint8_t chk =
        static_cast<std::uint8_t>(bytes[1] ^ bytes[2] ^ bytes[3] ^ bytes[4]);
    if (chk != bytes[5]) {
        std::ostringstream os;
        os << "RTDL integrity error: checksum mismatch on address 0x" << std::hex
           << static_cast<int>(bytes[1]);
        throw EncodingError(os.str());
    }
    RtdlFrame f;
    f.address = bytes[1];
    f.data = (static_cast<std::uint32_t>(bytes[2]) << 16) |
             (static_cast<std::uint32_t>(bytes[3]) << 8) | bytes[4];
    return f;
}

std::vector<std::uint8_t> default_encoder_addresses() {
    return {rtdl_addr::TodSecondsHi,     rtdl_addr::TodSecondsLo, rtdl_addr::RingRevolutionPeriod,
            rtdl_addr::OperatingMode,    rtdl_addr::GridPhaseDiff, rtdl_addr::LebtChopperParams,
            rtdl_addr::PreviousPulseData, rtdl_addr::DaqMode,      rtdl_addr::BeamProfileId,
            rtdl_addr::RfGates,          rtdl_addr::IocResetAddress};
}

std::int64_t broadcast_duration_ps(std::size_t frame_count, std::int64_t bitrate_bps) {
    if (bitrate_bps <= 0) throw ConfigError("rtdl: bitrate must be positive");
    const __int128 bits = static_cast<__int128>(frame_count) * kRtdlFrameBits;
    const __int128 ps = (bits * kPsPerSec + bitrate_bps / 2) / bitrate_bps;
    return static_cast<std::int64_t>(ps);
}

std::vector<FrameDelivery> broadcast_cycle(const FrameRegistry& reg, const EncoderList& list,
                                           const std::map<std::uint8_t, std::uint32_t>& values,
                                           SimTime at, SimTime deadline,
                                           std::int64_t bitrate_bps) {
    if (!(at < deadline)) throw SchedulingError("RTDL broadcast must start before Cycle Start");
    const std::int64_t total = broadcast_duration_ps(list.size(), bitrate_bps);
    if (at + total > deadline) {
        std::ostringstream os;
        os << "RTDL broadcast of " << list.size() << " frames needs " << total
           << " ps of lead but only " << (deadline - at) << " ps remain before Cycle Start";
        throw SchedulingError(os.str());
    }
    std::vector<FrameDelivery> out;
    out.reserve(list.size());
    const std::int64_t per_frame = broadcast_duration_ps(1, bitrate_bps);
    std::int64_t i = 0;
    for (std::uint8_t addr : list.addresses()) {
        (void)reg.name(addr);  // validates registration
        auto it = values.find(addr);
        if (it == values.end()) {
            std::ostringstream os;
            os << "no value supplied for listed RTDL address 0x" << std::hex
               << static_cast<int>(addr);
            throw ConfigError(os.str());
        }
        ++i;
        out.push_back({at + i * per_frame, RtdlFrame{addr, it->second}});
    }
    return out;
}

Timestamp timestamp_now(const TimestampContext& ctx, SimTime t) {
    if (!ctx.have_reference)
        throw StateError("no time reference: timestamp requested before first RTDL broadcast");
    Timestamp ts;
    ts.tod_seconds = ctx.tod_seconds;
    ts.cycle_index = ctx.cycle_index;
    // floor((t - cycle_start) / (ring_period/16)) == floor(16*dt / period)
    const std::int64_t dt = t - ctx.t_cycle_start;
    const __int128 n = static_cast<__int128>(dt) * 16;
    __int128 q = n / ctx.ring_period_ps;
    if (n % ctx.ring_period_ps != 0 && n < 0) --q;
    ts.fraction_ticks = static_cast<std::int64_t>(q);
    return ts;
}

std::uint32_t tod_hi(std::uint32_t seconds) { return (seconds >> 16) & 0xFFFF; }
std::uint32_t tod_lo(std::uint32_t seconds) { return seconds & 0xFFFF; }
std::uint32_t tod_join(std::uint32_t hi24, std::uint32_t lo24) {
    return ((hi24 & 0xFFFF) << 16) | (lo24 & 0xFFFF);
}

}  // namespace actsim
