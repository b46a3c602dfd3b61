#include "actsim/eventlink.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "actsim/error.hpp"

namespace actsim {

bool is_registered(std::uint8_t code) {
    if (code >= codes::CycleStart && code <= codes::EndCycle) return true;
    if (code >= codes::ChopperGateFirst && code <= codes::ChopperGateLast) return true;
    return false;
}

const char* code_name(std::uint8_t code) {
    switch (code) {
        case codes::Idle: return "Idle";
        case codes::CycleStart: return "CycleStart";
        case codes::RtdlStart: return "RTDLStart";
        case codes::InjectionStart: return "InjectionStart";
        case codes::KlystronGate: return "KlystronGate";
        case codes::DiagPretrig: return "DiagPretrig";
        case codes::Extraction: return "Extraction";
        case codes::SyncLost: return "SyncLost";
        case codes::EndCycle: return "EndCycle";
        default:
            if (code >= codes::ChopperGateFirst && code <= codes::ChopperGateLast)
                return "ChopperGate";
            return "Reserved";
    }
}

std::uint8_t odd_parity_bit(std::uint8_t data) {
    return (std::popcount(data) % 2 == 0) ? 1 : 0;
}

namespace {

void frame_bits(std::uint8_t code, std::uint8_t out[kFrameCells]) {
    out[0] = 1;  // start
    for (int i = 0; i < 8; ++i) out[1 + i] = (code >> (7 - i)) & 1;  // MSB first
    out[9] = odd_parity_bit(code);
    out[10] = 0;  // stop
}

void append_cell(std::vector<std::uint8_t>& levels, std::uint8_t& level, std::uint8_t bit) {
    level ^= 1;  // cell-boundary transition, always
    levels.push_back(level);
    if (bit) level ^= 1;  // mid-cell transition marks a logical 1
    levels.push_back(level);
}

}  // namespace

Bitstream encode(std::span<const LinkEvent> events, const RationalPs& cell,
                 std::int64_t total_cells) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const LinkEvent& ev = events[i];
        if (ev.tick < 0) throw EncodingError("event tick must be >= 0");
        if (ev.code == codes::Idle || !is_registered(ev.code)) {
            std::ostringstream os;
            os << "unregistered event code 0x" << std::hex << static_cast<int>(ev.code)
               << " at tick " << std::dec << ev.tick;
            throw EncodingError(os.str());
        }
        if (i > 0) {
            if (ev.tick < events[i - 1].tick) throw EncodingError("events must be sorted by tick");
            if (ev.tick - events[i - 1].tick < kFrameCells) {
                std::ostringstream os;
                os << "frames overlap: " << code_name(events[i - 1].code) << " at tick "
                   << events[i - 1].tick << " and " << code_name(ev.code) << " at tick "
                   << ev.tick;
                throw EncodingError(os.str());
            }
        }
    }
    std::int64_t cells = total_cells;
    if (cells == 0) cells = events.empty() ? 0 : events.back().tick + kFrameCells + 1;
    if (!events.empty() && events.back().tick + kFrameCells > cells)
        throw EncodingError("stream too short for last frame");

    Bitstream bs;
    bs.cell = cell;
    bs.levels.reserve(static_cast<std::size_t>(cells) * 2);
    std::uint8_t level = 0;
    std::size_t next = 0;
    std::int64_t c = 0;
    while (c < cells) {
        if (next < events.size() && c == events[next].tick) {
            std::uint8_t bits[kFrameCells];
            frame_bits(events[next].code, bits);
            for (int i = 0; i < kFrameCells; ++i) append_cell(bs.levels, level, bits[i]);
            c += kFrameCells;
            ++next;
        } else {
            append_cell(bs.levels, level, 0);
            ++c;
        }
    }
    return bs;
}

namespace {

struct Run {
    std::int64_t len;
};

std::vector<Run> to_runs(const std::vector<std::uint8_t>& levels) {
    std::vector<Run> runs;
    std::int64_t len = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i > 0 && (levels[i] != 0) != (levels[i - 1] != 0)) {
            runs.push_back({len});
            len = 0;
        }
        ++len;
    }
    if (len > 0) runs.push_back({len});
    return runs;
}

}  // namespace

DecodedLink decode(const Bitstream& bs) {
    DecodedLink out;
    if (bs.levels.empty()) return out;

    const std::vector<Run> runs = to_runs(bs.levels);
    if (runs.size() < 2) {
        out.errors.push_back({LinkDecodeError::Kind::Framing, 0,
                              "no transitions: line is constant, no clock to recover"});
        return out;
    }

    // Clock recovery: the shortest spacing between transitions is either a
    // half cell (a 1 was transmitted) or a full cell (all-zero stream).
    std::int64_t unit = runs.front().len;
    for (const Run& r : runs) unit = std::min(unit, r.len);
    bool saw_double = false;
    for (const Run& r : runs) {
        const std::int64_t k = (r.len + unit / 2) / unit;
        if (k >= 2) { saw_double = true; break; }
    }
    // Without any short/long contrast the stream carries only zeros, so the
    // minimal spacing is already a full cell.
    const std::int64_t cell_samples = saw_double ? 2 * unit : unit;
    const std::int64_t half_samples = saw_double ? unit : 0;
    out.recovered_cell = RationalPs{bs.cell.num * cell_samples, bs.cell.den * 2};

    // Runs -> logical bits.
    std::vector<std::uint8_t> bits;
    bits.reserve(runs.size());
    std::int64_t pos = 0;  // sample index, for error reports
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::int64_t len = runs[i].len;
        const std::int64_t start_cell = pos / cell_samples;
        pos += len;
        if (half_samples > 0) {
            const std::int64_t k = (len + half_samples / 2) / half_samples;
            if (k == 1) {
                // First half of a 1-cell; its partner must follow.
                if (i + 1 < runs.size() &&
                    (runs[i + 1].len + half_samples / 2) / half_samples == 1) {
                    bits.push_back(1);
                    pos += runs[i + 1].len;
                    ++i;
                } else {
                    out.errors.push_back({LinkDecodeError::Kind::Framing, start_cell,
                                          "dangling half-cell transition"});
                }
            } else if (k == 2) {
                bits.push_back(0);
            } else {
                // Missing transitions; keep cell positions roughly aligned.
                out.errors.push_back({LinkDecodeError::Kind::Framing, start_cell,
                                      "transition-free span longer than one cell"});
                for (std::int64_t z = 0; z < k / 2; ++z) bits.push_back(0);
            }
        } else {
            const std::int64_t k = (len + cell_samples / 2) / cell_samples;
            for (std::int64_t z = 0; z < k; ++z) bits.push_back(0);
        }
    }
    out.cells = static_cast<std::int64_t>(bits.size());

    // Framing: start(1), 8 data bits MSB first, odd parity, stop(0).
    std::size_t i = 0;
    while (i < bits.size()) {
        if (bits[i] == 0) { ++i; continue; }
        const std::int64_t tick = static_cast<std::int64_t>(i);
        if (i + kFrameCells > bits.size()) {
            out.errors.push_back({LinkDecodeError::Kind::Framing, tick, "truncated frame"});
            break;
        }
        std::uint8_t data = 0;
        for (int b = 0; b < 8; ++b) data = static_cast<std::uint8_t>((data << 1) | bits[i + 1 + b]);
        const std::uint8_t parity = bits[i + 9];
        const std::uint8_t stop = bits[i + 10];
        if ((std::popcount(data) + parity) % 2 != 1) {
            std::ostringstream os;
            os << "parity mismatch on frame at tick " << tick;
            out.errors.push_back({LinkDecodeError::Kind::Parity, tick, os.str()});
            i += kFrameCells;
            continue;
        }
        if (stop != 0) {
            out.errors.push_back({LinkDecodeError::Kind::Framing, tick, "missing stop bit"});
            // Resynchronize at the first idle cell past the corrupt frame.
            i += kFrameCells;
            while (i < bits.size() && bits[i] != 0) ++i;
            continue;
        }
        out.events.push_back({tick, data});
        i += kFrameCells;
    }
    return out;
}

SimTime arm_delay(const DelayCounter& counter, const RingRfClock& clock, SimTime arm_at) {
    if (!clock.latched())
        throw StateError("delay counter armed before ring-rf phase reset");
    if (counter.delay_ticks < 0) throw ConfigError("delay_ticks must be >= 0");
    // delay_ticks * ring_period / 16, exact; ps rounding only at the result.
    const __int128 n = static_cast<__int128>(counter.delay_ticks) * clock.ring_period_ps();
    __int128 q = n / 16;
    const __int128 r = n % 16;
    if (2 * r >= 16) q += 1;
    return arm_at + static_cast<std::int64_t>(q);
}

namespace {
constexpr char kMagic[5] = {'E', 'V', 'L', 'K', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
    char b[8];
    is.read(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}
}  // namespace

void save_bitstream(const std::string& path, const Bitstream& bs) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put_u64(os, static_cast<std::uint64_t>(bs.cell.num));
    put_u64(os, static_cast<std::uint64_t>(bs.cell.den));
    put_u64(os, bs.levels.size());
    std::uint8_t acc = 0;
    int nbits = 0;
    for (std::uint8_t lv : bs.levels) {
        acc |= static_cast<std::uint8_t>((lv & 1) << nbits);  // LSB-first within byte
        if (++nbits == 8) {
            os.put(static_cast<char>(acc));
            acc = 0;
            nbits = 0;
        }
    }
    if (nbits > 0) os.put(static_cast<char>(acc));
    if (!os) throw Error("write failed: " + path);
}

Bitstream load_bitstream(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, kMagic, 5) != 0)
        throw Error(path + ": not an event-link bitstream (bad magic)");
    Bitstream bs;
    const auto num = static_cast<std::int64_t>(get_u64(is));
    const auto den = static_cast<std::int64_t>(get_u64(is));
    const std::uint64_t count = get_u64(is);
    if (!is || den <= 0 || num <= 0) throw Error(path + ": corrupt header");
    bs.cell = RationalPs{num, den};
    bs.levels.reserve(count);
    std::uint8_t acc = 0;
    int nbits = 8;
    for (std::uint64_t i = 0; i < count; ++i) {
        if (nbits == 8) {
            const int c = is.get();
            if (c < 0) throw Error(path + ": truncated level data");
            acc = static_cast<std::uint8_t>(c);
            nbits = 0;
        }
        bs.levels.push_back((acc >> nbits) & 1);
        ++nbits;
    }
    return bs;
}

}  // namespace actsim
