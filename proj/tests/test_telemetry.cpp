#include <doctest.h>

#include <cstdlib>
#include <random>

#include "ipt/telemetry.hpp"

using namespace ipt;

TEST_CASE("crc32 known vector") {
  const char* s = "123456789";
  CHECK(crc32_ieee({reinterpret_cast<const uint8_t*>(s), 9}) == 0xCBF43926u);
}

TEST_CASE("encode_datagram layout") {
  PoseDatagram d;
  d.seq = 0;
  d.timestamp_us = 0;
  const auto bytes = encode_datagram(d);
  CHECK(bytes.size() == 86);
  CHECK(bytes[0] == 'I');
  CHECK(bytes[1] == 'P');
  CHECK(bytes[2] == 'T');
  CHECK(bytes[3] == '1');
  // Identity quaternion: qw = 1.0 at offset 40, little-endian f64.
  CHECK(bytes[40 + 7] == 0x3F);
  CHECK(bytes[40 + 6] == 0xF0);

  SUBCASE("non-finite field rejected") {
    PoseDatagram bad = d;
    bad.x = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(encode_datagram(bad), ParamError);
  }
  SUBCASE("non-unit quaternion rejected") {
    PoseDatagram bad = d;
    bad.qw = 0.5;
    CHECK_THROWS_AS(encode_datagram(bad), ParamError);
  }
}

TEST_CASE("encode/decode round trip on random poses") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    PoseDatagram d;
    d.seq = static_cast<uint32_t>(gen());
    d.timestamp_us = gen();
    d.x = pos(gen);
    d.y = pos(gen);
    d.z = pos(gen);
    Eigen::Vector4d q(unit(gen), unit(gen), unit(gen), unit(gen));
    while (q.norm() < 1e-6) q = {unit(gen), unit(gen), unit(gen), unit(gen)};
    q.normalize();
    d.qw = q[0];
    d.qx = q[1];
    d.qy = q[2];
    d.qz = q[3];
    d.rmse = std::abs(pos(gen));
    d.n_tags = static_cast<uint16_t>(gen() % 82);

    const auto bytes = encode_datagram(d);
    const DecodeResult r = decode_datagram(bytes);
    REQUIRE(r.ok());
    CHECK(r.datagram->seq == d.seq);
    CHECK(r.datagram->timestamp_us == d.timestamp_us);
    CHECK(r.datagram->x == d.x);
    CHECK(r.datagram->y == d.y);
    CHECK(r.datagram->z == d.z);
    CHECK(r.datagram->qw == d.qw);
    CHECK(r.datagram->qx == d.qx);
    CHECK(r.datagram->qy == d.qy);
    CHECK(r.datagram->qz == d.qz);
    CHECK(r.datagram->rmse == d.rmse);
    CHECK(r.datagram->n_tags == d.n_tags);
  }
}

TEST_CASE("decode rejects malformed frames with distinct error kinds") {
  PoseDatagram d;
  d.seq = 1;
  d.timestamp_us = 1000000;
  const auto bytes = encode_datagram(d);

  SUBCASE("short buffer") {
    const DecodeResult r = decode_datagram({bytes.data(), 85});
    CHECK_FALSE(r.ok());
    CHECK(*r.error == DecodeError::ShortBuffer);
  }
  SUBCASE("bad magic") {
    auto mutated = bytes;
    mutated[0] = 'X';
    const DecodeResult r = decode_datagram(mutated);
    CHECK_FALSE(r.ok());
    CHECK(*r.error == DecodeError::BadMagic);
  }
  SUBCASE("flipped payload bit fails the CRC") {
    auto mutated = bytes;
    mutated[20] ^= 0x04;
    const DecodeResult r = decode_datagram(mutated);
    CHECK_FALSE(r.ok());
    CHECK(*r.error == DecodeError::BadCrc);
  }
  SUBCASE("flipped CRC byte fails the CRC") {
    auto mutated = bytes;
    mutated[85] ^= 0xFF;
    const DecodeResult r = decode_datagram(mutated);
    CHECK_FALSE(r.ok());
    CHECK(*r.error == DecodeError::BadCrc);
  }
}

TEST_CASE("golden frame is frozen") {
  // encode(identity pose, seq=1, t=1000000 us) byte-for-byte. Catches any
  // accidental layout or CRC change.
  PoseDatagram d;
  d.seq = 1;
  d.timestamp_us = 1000000;
  const auto bytes = encode_datagram(d);
  // Frozen from the encoder; CRC cross-checked against zlib's crc32.
  const char* expected_hex =
      "495054310100000040420f0000000000"
      "00000000000000000000000000000000"
      "0000000000000000000000000000f03f"
      "00000000000000000000000000000000"
      "00000000000000000000000000000000"
      "0000c94b7815";
  std::string got;
  for (uint8_t b : bytes) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", b);
    got += buf;
  }
  CHECK(got == expected_hex);
}

TEST_CASE("telemetry address resolution") {
  CHECK(telemetry_address("10.0.0.1:5000") == "10.0.0.1:5000");
  setenv(kTelemetryAddrEnv, "192.168.1.50:48000", 1);
  CHECK(telemetry_address() == "192.168.1.50:48000");
  unsetenv(kTelemetryAddrEnv);
  CHECK(telemetry_address() == "127.0.0.1:47001");
}

TEST_CASE("UDP loopback: latest-wins, loss and garbage tolerance") {
  UdpReceiver receiver("127.0.0.1:0");  // ephemeral port
  REQUIRE(receiver.port() != 0);
  UdpSender sender("127.0.0.1:" + std::to_string(receiver.port()));

  auto make = [](uint32_t seq) {
    PoseDatagram d;
    d.seq = seq;
    d.timestamp_us = seq * 1000;
    return encode_datagram(d);
  };

  SUBCASE("out-of-order sequence keeps the max") {
    for (uint32_t seq : {1u, 3u, 2u}) sender.send(make(seq));
    int waited = 0;
    while (receiver.accepted() < 2 && waited < 50) {
      receiver.poll(20);
      ++waited;
    }
    REQUIRE(receiver.latest().has_value());
    CHECK(receiver.latest()->seq == 3);
    CHECK(receiver.discarded_stale() >= 1);
  }

  SUBCASE("malformed datagrams are counted, stream continues") {
    const uint8_t junk[5] = {1, 2, 3, 4, 5};
    sender.send({junk, 5});
    sender.send(make(10));
    int waited = 0;
    while (receiver.accepted() < 1 && waited < 50) {
      receiver.poll(20);
      ++waited;
    }
    CHECK(receiver.decode_failures() >= 1);
    REQUIRE(receiver.latest().has_value());
    CHECK(receiver.latest()->seq == 10);
  }

  SUBCASE("receiver converges under drop (simulated by skipping sends)") {
    for (uint32_t seq = 1; seq <= 20; ++seq) {
      if (seq % 2 == 0) continue;  // "lost" half the datagrams
      sender.send(make(seq));
    }
    int waited = 0;
    while (receiver.accepted() < 10 && waited < 100) {
      receiver.poll(20);
      ++waited;
    }
    REQUIRE(receiver.latest().has_value());
    CHECK(receiver.latest()->seq == 19);
  }
}
