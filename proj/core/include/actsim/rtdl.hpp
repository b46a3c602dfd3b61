#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actsim/engine.hpp"
#include "actsim/time.hpp"

namespace actsim {

/// Addressed 24-bit broadcast datum.
struct RtdlFrame {
    std::uint8_t address{0};
    std::uint32_t data{0};  // < 2^24
    bool operator==(const RtdlFrame&) const = default;
};

inline constexpr std::uint8_t kRtdlSync = 0x7E;
inline constexpr int kRtdlFrameBytes = 6;
inline constexpr int kRtdlFrameBits = kRtdlFrameBytes * 8;

/// Well-known frame addresses.
namespace rtdl_addr {
inline constexpr std::uint8_t TodSecondsHi = 0x01;
inline constexpr std::uint8_t RingRevolutionPeriod = 0x02;
inline constexpr std::uint8_t OperatingMode = 0x03;
inline constexpr std::uint8_t GridPhaseDiff = 0x04;   // signed, units of 0.1 us
inline constexpr std::uint8_t LebtChopperParams = 0x05;
inline constexpr std::uint8_t PreviousPulseData = 0x06;
inline constexpr std::uint8_t DaqMode = 0x07;
inline constexpr std::uint8_t BeamProfileId = 0x08;
inline constexpr std::uint8_t RfGates = 0x09;
inline constexpr std::uint8_t TodSecondsLo = 0x0A;
inline constexpr std::uint8_t IocResetAddress = 0x0B;
}  // namespace rtdl_addr

/// Address -> semantic name. The default registry carries the facility's
/// frame set (time-of-day split across two addresses because one 24-bit frame
/// cannot hold 32-bit seconds).
class FrameRegistry {
public:
    static FrameRegistry defaults();

    void define(std::uint8_t address, std::string name);
    bool contains(std::uint8_t address) const;
    const std::string& name(std::uint8_t address) const;  // throws ConfigError if unknown
    std::size_t size() const { return names_.size(); }

private:
    std::map<std::uint8_t, std::string> names_;
};

/// Ordered transmit list; every address registered, duplicates forbidden.
class EncoderList {
public:
    EncoderList() = default;
    EncoderList(std::vector<std::uint8_t> addresses, const FrameRegistry& reg);
    const std::vector<std::uint8_t>& addresses() const { return addresses_; }
    bool empty() const { return addresses_.empty(); }
    std::size_t size() const { return addresses_.size(); }

private:
    std::vector<std::uint8_t> addresses_;
};

/// Wire form: [0x7E sync, address, data_hi, data_mid, data_lo, checksum],
/// checksum = address XOR the three data bytes. Throws EncodingError on
/// 24-bit overflow.
std::array<std::uint8_t, kRtdlFrameBytes> encode_frame(const RtdlFrame& f);

/// Throws Error subclasses: bad sync -> framing, checksum mismatch ->
/// integrity, short input -> framing.
RtdlFrame decode_frame(std::span<const std::uint8_t> bytes);

struct FrameDelivery {
    SimTime at;
    RtdlFrame frame;
};

/// Emits the whole encoder list back to back starting at `at`; each frame's
/// delivery instant is the end of its 48 bits on a link of `bitrate_bps`.
/// Throws SchedulingError (with the required lead) if the broadcast would
/// overrun `deadline` (the cycle's Cycle Start).
std::vector<FrameDelivery> broadcast_cycle(const FrameRegistry& reg, const EncoderList& list,
                                           const std::map<std::uint8_t, std::uint32_t>& values,
                                           SimTime at, SimTime deadline,
                                           std::int64_t bitrate_bps);

std::int64_t broadcast_duration_ps(std::size_t frame_count, std::int64_t bitrate_bps);

/// The default transmit order: every frame in the default registry.
std::vector<std::uint8_t> default_encoder_addresses();

/// Per-machine-cycle timestamp: 32-bit time-of-day seconds from the latest
/// broadcast, the cycle index, and a fractional part counted in carrier
/// ticks since Cycle Start.
struct Timestamp {
    std::uint32_t tod_seconds{0};
    std::int64_t cycle_index{0};
    std::int64_t fraction_ticks{0};
    auto operator<=>(const Timestamp&) const = default;
};

struct TimestampContext {
    bool have_reference{false};
    std::uint32_t tod_seconds{0};
    std::int64_t cycle_index{0};
    SimTime t_cycle_start;
    std::int64_t ring_period_ps{0};
};

/// fraction_ticks = floor((t - t_cycle_start) / (ring_period/16)).
/// Throws StateError before the first broadcast.
Timestamp timestamp_now(const TimestampContext& ctx, SimTime t);

/// Split/join helpers for the 32-bit TOD across the two TOD frames.
std::uint32_t tod_hi(std::uint32_t seconds);
std::uint32_t tod_lo(std::uint32_t seconds);
std::uint32_t tod_join(std::uint32_t hi24, std::uint32_t lo24);

}  // namespace actsim
