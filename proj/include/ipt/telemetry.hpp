#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "ipt/pnp.hpp"

namespace ipt {

// Fixed 86-byte little-endian frame:
//   0   magic "IPT1"            4 bytes
//   4   seq                     u32
//   8   timestamp_us            u64
//  16   x, y, z                 3 x f64 (meters)
//  40   qw, qx, qy, qz          4 x f64 (unit quaternion, w >= 0)
//  72   rmse                    f64 (pixels)
//  80   n_tags                  u16
//  82   crc32                   u32 over bytes [0, 82)
constexpr size_t kDatagramSize = 86;
constexpr std::array<uint8_t, 4> kDatagramMagic{'I', 'P', 'T', '1'};
constexpr uint16_t kDefaultTelemetryPort = 47001;
constexpr const char* kTelemetryAddrEnv = "IPT_TELEMETRY_ADDR";

struct PoseDatagram {
  uint32_t seq = 0;
  uint64_t timestamp_us = 0;
  double x = 0, y = 0, z = 0;
  double qw = 1, qx = 0, qy = 0, qz = 0;
  double rmse = 0;
  uint16_t n_tags = 0;
};

enum class DecodeError { ShortBuffer, BadMagic, BadCrc, BadQuaternion };
const char* to_string(DecodeError e);

struct DecodeResult {
  std::optional<PoseDatagram> datagram;
  std::optional<DecodeError> error;
  bool ok() const { return datagram.has_value(); }
};

uint32_t crc32_ieee(std::span<const uint8_t> bytes);

// Throws ParamError on non-finite fields or a non-unit quaternion.
std::array<uint8_t, kDatagramSize> encode_datagram(const PoseDatagram& d);
std::array<uint8_t, kDatagramSize> encode_datagram(const WorldPose& pose, uint32_t seq,
                                                   uint64_t timestamp_us, double rmse,
                                                   uint16_t n_tags);

DecodeResult decode_datagram(std::span<const uint8_t> bytes);

// "host:port"; falls back to IPT_TELEMETRY_ADDR, then localhost:47001.
std::string telemetry_address(const std::string& override_addr = {});

// Fire-and-forget datagram sender, one thread at a time.
class UdpSender {
 public:
  explicit UdpSender(const std::string& addr = {});
  ~UdpSender();
  UdpSender(const UdpSender&) = delete;
  UdpSender& operator=(const UdpSender&) = delete;

  void send(std::span<const uint8_t> bytes);

 private:
  int fd_ = -1;
};

// Latest-pose-wins receiver: old or duplicate sequence numbers are
// discarded, malformed datagrams are counted and skipped. The snapshot is
// readable from any thread.
class UdpReceiver {
 public:
  explicit UdpReceiver(const std::string& bind_addr = {});
  ~UdpReceiver();
  UdpReceiver(const UdpReceiver&) = delete;
  UdpReceiver& operator=(const UdpReceiver&) = delete;

  // Drains pending datagrams, waiting up to timeout_ms for the first one.
  // Returns the number of accepted datagrams.
  int poll(int timeout_ms);

  std::optional<PoseDatagram> latest() const;
  uint64_t accepted() const { return accepted_; }
  uint64_t discarded_stale() const { return discarded_stale_; }
  uint64_t decode_failures() const { return decode_failures_; }
  uint16_t port() const { return port_; }

 private:
  void ingest(std::span<const uint8_t> bytes);

  int fd_ = -1;
  uint16_t port_ = 0;
  mutable std::mutex mutex_;
  std::optional<PoseDatagram> latest_;
  uint64_t accepted_ = 0;
  uint64_t discarded_stale_ = 0;
  uint64_t decode_failures_ = 0;
};

}  // namespace ipt
