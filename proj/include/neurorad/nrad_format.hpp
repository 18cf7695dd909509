#pragma once

// NRAD event file: uncompressed interchange form of an EventStream.
//
//   offset  size  field
//        0     4  magic "NRAD"
//        4     1  version (1)
//        5     1  flags (0)
//        6     8  tick_rate, Hz (u64 LE)
//       14     8  duration_ticks (u64 LE)
//       22     4  event_count (u32 LE)
//       26  12*n  records {t_ticks u64 LE, polarity i8, pad u8 x3 = 0}

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/byte_io.hpp"
#include "neurorad/error.hpp"

namespace neurorad {

inline constexpr std::size_t kNradHeaderBytes = 26;
inline constexpr std::size_t kNradRecordBytes = 12;
inline constexpr std::uint8_t kNradVersion = 1;

inline std::vector<std::uint8_t> serialize(const EventStream& s) {
  if (!(s.tick_rate > 0.0) || std::floor(s.tick_rate) != s.tick_rate)
    throw ContractError("NRAD requires a positive integer tick rate");
  if (s.events.size() > std::numeric_limits<std::uint32_t>::max())
    throw ContractError("too many events for NRAD");
  if (!is_strictly_sorted(s.events))
    throw ContractError("NRAD requires strictly increasing timestamps");
  ByteWriter w;
  for (char c : std::string_view("NRAD")) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kNradVersion);
  w.u8(0);
  w.u64(static_cast<std::uint64_t>(s.tick_rate));
  w.u64(s.duration_ticks);
  w.u32(static_cast<std::uint32_t>(s.events.size()));
  for (const auto& e : s.events) {
    w.u64(e.t_ticks);
    w.i8(e.polarity);
    w.zeros(3);
  }
  return std::move(w).take();
}

inline EventStream parse_event_stream(std::span<const std::uint8_t> data) {
  if (auto bad = magic_mismatch(data, "NRAD")) throw FormatError(*bad, "bad NRAD magic");
  ByteReader r(data);
  r.u32();
  if (r.u8() != kNradVersion) throw FormatError(4, "unsupported NRAD version");
  if (r.u8() != 0) throw FormatError(5, "unknown NRAD flags");
  EventStream s;
  const auto tick_rate = r.u64();
  if (tick_rate == 0) throw FormatError(6, "zero NRAD tick rate");
  s.tick_rate = static_cast<double>(tick_rate);
  s.duration_ticks = r.u64();
  const std::uint32_t count = r.u32();
  if (r.remaining() != std::size_t{count} * kNradRecordBytes)
    throw FormatError(22, "NRAD event count " + std::to_string(count) +
                              " does not match payload of " +
                              std::to_string(r.remaining()) + " bytes");
  s.events.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos();
    EventRecord e;
    e.t_ticks = r.u64();
    e.polarity = r.i8();
    if (e.polarity != 1 && e.polarity != -1)
      throw FormatError(at + 8, "NRAD polarity must be +1 or -1");
    for (int p = 0; p < 3; ++p)
      if (r.u8() != 0) throw FormatError(at + 9 + p, "nonzero NRAD padding");
    if (!s.events.empty() && e.t_ticks <= s.events.back().t_ticks)
      throw FormatError(at, "NRAD timestamps not strictly increasing");
    if (e.t_ticks > s.duration_ticks)
      throw FormatError(at, "NRAD timestamp beyond stream duration");
    s.events.push_back(e);
  }
  return s;
}

inline void save_event_stream(const std::string& path, const EventStream& s) {
  write_file_bytes(path, serialize(s));
}

inline EventStream load_event_stream(const std::string& path) {
  return parse_event_stream(read_file_bytes(path));
}

}  // namespace neurorad
