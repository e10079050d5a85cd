#include "ipt/telemetry.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace ipt {

namespace {

const uint32_t* crc_table() {
  static const uint32_t* table = [] {
    static uint32_t t[256];
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = c & 1 ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

template <typename T>
void put_le(uint8_t* dst, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    dst[i] = static_cast<uint8_t>(value >> (8 * i));
  }
}

template <typename T>
T get_le(const uint8_t* src) {
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(src[i]) << (8 * i);
  }
  return value;
}

void put_f64(uint8_t* dst, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_le(dst, bits);
}

double get_f64(const uint8_t* src) {
  const uint64_t bits = get_le<uint64_t>(src);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

// "host:port" -> sockaddr. Numeric or resolvable host.
sockaddr_in parse_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ConfigError("telemetry: address needs host:port");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));
  // Port 0 binds an ephemeral port on the receive side.
  if (port < 0 || port > 65535) throw ConfigError("telemetry: bad port in " + addr);

  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(static_cast<uint16_t>(port));
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
      throw ConfigError("telemetry: cannot resolve host " + host);
    }
    sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return sa;
}

}  // namespace

const char* to_string(DecodeError e) {
  switch (e) {
    case DecodeError::ShortBuffer: return "short buffer";
    case DecodeError::BadMagic: return "bad magic";
    case DecodeError::BadCrc: return "crc mismatch";
    case DecodeError::BadQuaternion: return "non-unit quaternion";
  }
  return "?";
}

uint32_t crc32_ieee(std::span<const uint8_t> bytes) {
  const uint32_t* table = crc_table();
  uint32_t crc = 0xFFFFFFFFu;
  for (uint8_t b : bytes) crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::array<uint8_t, kDatagramSize> encode_datagram(const PoseDatagram& d) {
  const double fields[] = {d.x, d.y, d.z, d.qw, d.qx, d.qy, d.qz, d.rmse};
  for (double f : fields) {
    if (!std::isfinite(f)) throw ParamError("telemetry: non-finite field");
  }
  const double qn = std::sqrt(d.qw * d.qw + d.qx * d.qx + d.qy * d.qy + d.qz * d.qz);
  if (std::abs(qn - 1.0) > 1e-6) {
    throw ParamError("telemetry: quaternion norm deviates from 1");
  }

  std::array<uint8_t, kDatagramSize> out{};
  std::copy(kDatagramMagic.begin(), kDatagramMagic.end(), out.begin());
  put_le(out.data() + 4, d.seq);
  put_le(out.data() + 8, d.timestamp_us);
  put_f64(out.data() + 16, d.x);
  put_f64(out.data() + 24, d.y);
  put_f64(out.data() + 32, d.z);
  put_f64(out.data() + 40, d.qw);
  put_f64(out.data() + 48, d.qx);
  put_f64(out.data() + 56, d.qy);
  put_f64(out.data() + 64, d.qz);
  put_f64(out.data() + 72, d.rmse);
  put_le(out.data() + 80, d.n_tags);
  put_le(out.data() + 82, crc32_ieee({out.data(), 82}));
  return out;
}

std::array<uint8_t, kDatagramSize> encode_datagram(const WorldPose& pose, uint32_t seq,
                                                   uint64_t timestamp_us, double rmse,
                                                   uint16_t n_tags) {
  const Eigen::Vector4d q = quaternion_wxyz(pose.rotation);
  PoseDatagram d;
  d.seq = seq;
  d.timestamp_us = timestamp_us;
  d.x = pose.translation.x();
  d.y = pose.translation.y();
  d.z = pose.translation.z();
  d.qw = q[0];
  d.qx = q[1];
  d.qy = q[2];
  d.qz = q[3];
  d.rmse = rmse;
  d.n_tags = n_tags;
  return encode_datagram(d);
}

DecodeResult decode_datagram(std::span<const uint8_t> bytes) {
  DecodeResult r;
  if (bytes.size() != kDatagramSize) {
    r.error = DecodeError::ShortBuffer;
    return r;
  }
  if (!std::equal(kDatagramMagic.begin(), kDatagramMagic.end(), bytes.begin())) {
    r.error = DecodeError::BadMagic;
    return r;
  }
  const uint32_t crc = get_le<uint32_t>(bytes.data() + 82);
  if (crc != crc32_ieee(bytes.subspan(0, 82))) {
    r.error = DecodeError::BadCrc;
    return r;
  }
  PoseDatagram d;
  d.seq = get_le<uint32_t>(bytes.data() + 4);
  d.timestamp_us = get_le<uint64_t>(bytes.data() + 8);
  d.x = get_f64(bytes.data() + 16);
  d.y = get_f64(bytes.data() + 24);
  d.z = get_f64(bytes.data() + 32);
  d.qw = get_f64(bytes.data() + 40);
  d.qx = get_f64(bytes.data() + 48);
  d.qy = get_f64(bytes.data() + 56);
  d.qz = get_f64(bytes.data() + 64);
  d.rmse = get_f64(bytes.data() + 72);
  d.n_tags = get_le<uint16_t>(bytes.data() + 80);
  const double qn = std::sqrt(d.qw * d.qw + d.qx * d.qx + d.qy * d.qy + d.qz * d.qz);
  if (!std::isfinite(qn) || std::abs(qn - 1.0) > 1e-6) {
    r.error = DecodeError::BadQuaternion;
    return r;
  }
  r.datagram = d;
  return r;
}

std::string telemetry_address(const std::string& override_addr) {
  if (!override_addr.empty()) return override_addr;
  if (const char* env = std::getenv(kTelemetryAddrEnv); env != nullptr && env[0] != 0) {
    return env;
  }
  return "127.0.0.1:" + std::to_string(kDefaultTelemetryPort);
}

UdpSender::UdpSender(const std::string& addr) {
  const sockaddr_in sa = parse_addr(telemetry_address(addr));
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw PipelineError("telemetry: socket() failed");
  if (::connect(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw PipelineError("telemetry: connect() failed");
  }
}

UdpSender::~UdpSender() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSender::send(std::span<const uint8_t> bytes) {
  if (::send(fd_, bytes.data(), bytes.size(), 0) < 0) {
    throw PipelineError(std::string("telemetry: send failed: ") + std::strerror(errno));
  }
}

UdpReceiver::UdpReceiver(const std::string& bind_addr) {
  std::string addr = bind_addr;
  if (addr.empty()) {
    addr = telemetry_address();
    // Bind listeners to all interfaces unless explicitly overridden.
    if (addr.rfind("127.0.0.1:", 0) == 0) addr = "0.0.0.0" + addr.substr(9);
  }
  const sockaddr_in sa = parse_addr(addr);
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw PipelineError("telemetry: socket() failed");
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw PipelineError("telemetry: bind failed on " + addr + ": " + std::strerror(errno));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
    port_ = ntohs(bound.sin_port);
  }
}

UdpReceiver::~UdpReceiver() {
  if (fd_ >= 0) ::close(fd_);
}

int UdpReceiver::poll(int timeout_ms) {
  int got = 0;
  int wait = timeout_ms;
  uint8_t buf[512];
  for (;;) {
    pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, wait);
    if (pr <= 0) break;
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n < 0) break;
    const uint64_t before = accepted_;
    ingest({buf, static_cast<size_t>(n)});
    got += static_cast<int>(accepted_ - before);
    wait = 0;  // drain whatever else is queued without blocking again
  }
  return got;
}

void UdpReceiver::ingest(std::span<const uint8_t> bytes) {
  const DecodeResult r = decode_datagram(bytes);
  if (!r.ok()) {
    ++decode_failures_;
    return;
  }
  std::lock_guard lock(mutex_);
  if (latest_ && r.datagram->seq <= latest_->seq) {
    ++discarded_stale_;
    return;
  }
  latest_ = r.datagram;
  ++accepted_;
}

std::optional<PoseDatagram> UdpReceiver::latest() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

}  // namespace ipt
