#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actsim/mtg.hpp"
#include "actsim/time.hpp"

namespace actsim {

/// Event-code registry for the distribution link. 0x00 is the idle line and
/// is never transmitted.
namespace codes {
inline constexpr std::uint8_t Idle = 0x00;
inline constexpr std::uint8_t CycleStart = 0x01;
inline constexpr std::uint8_t RtdlStart = 0x02;
inline constexpr std::uint8_t InjectionStart = 0x03;
inline constexpr std::uint8_t KlystronGate = 0x04;
inline constexpr std::uint8_t DiagPretrig = 0x05;
inline constexpr std::uint8_t Extraction = 0x06;
inline constexpr std::uint8_t SyncLost = 0x07;
inline constexpr std::uint8_t EndCycle = 0x08;
inline constexpr std::uint8_t ChopperGateFirst = 0x10;
inline constexpr std::uint8_t ChopperGateLast = 0x1F;
}  // namespace codes

bool is_registered(std::uint8_t code);
const char* code_name(std::uint8_t code);

/// A scheduled link event: frame start position in carrier ticks plus code.
struct LinkEvent {
    std::int64_t tick{0};
    std::uint8_t code{0};
    bool operator==(const LinkEvent&) const = default;
};

/// Physical biphase-mark stream: one entry per half bit-cell. Every cell
/// boundary carries a level transition; a logical 1 adds a mid-cell
/// transition. The stream is decodable from the transition sequence alone.
struct Bitstream {
    RationalPs cell{1, 1};          // authored cell duration, ps
    std::vector<std::uint8_t> levels;  // 0/1 per half cell

    std::int64_t cells() const { return static_cast<std::int64_t>(levels.size()) / 2; }
};

inline constexpr int kFrameCells = 11;  // start + 8 data (MSB first) + odd parity + stop

/// Odd parity over the 8 data bits: the parity bit makes the total number of
/// ones among data+parity odd.
std::uint8_t odd_parity_bit(std::uint8_t data);

/// Encodes a sorted schedule onto an idle line. Frames must not overlap
/// (start ticks at least kFrameCells apart) and codes must be registered and
/// nonzero. total_cells == 0 sizes the stream to the last frame plus one idle
/// cell.
Bitstream encode(std::span<const LinkEvent> events, const RationalPs& cell,
                 std::int64_t total_cells = 0);

struct LinkDecodeError {
    enum class Kind { Parity, Framing };
    Kind kind;
    std::int64_t cell_index;  // start cell of the offending frame / region
    std::string detail;
};

struct DecodedLink {
    std::vector<LinkEvent> events;
    std::vector<LinkDecodeError> errors;
    RationalPs recovered_cell{0, 1};  // from transition spacing alone
    std::int64_t cells{0};
};

/// Clock recovery plus framing from an arbitrary level sequence. Bad frames
/// are reported and dropped; decoding resynchronizes at the next idle run.
DecodedLink decode(const Bitstream& bs);

/// Beam-synchronous delay counter: fires exactly delay_ticks carrier ticks
/// after the arming event, in tick arithmetic (never ps).
struct DelayCounter {
    std::uint8_t arm_event{0};
    std::int64_t delay_ticks{0};
};

/// Throws StateError when the ring-rf clock has not been phase-reset.
SimTime arm_delay(const DelayCounter& counter, const RingRfClock& clock, SimTime arm_at);

/// File form: magic "EVLK1", u64-LE cell numerator / denominator / half-cell
/// count, then levels packed LSB-first within each byte.
void save_bitstream(const std::string& path, const Bitstream& bs);
Bitstream load_bitstream(const std::string& path);

}  // namespace actsim
