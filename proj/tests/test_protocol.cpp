#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "wrsn/protocol.hpp"
#include "wrsn/rng.hpp"
#include "wrsn/server.hpp"

using namespace wrsn;
using namespace wrsn::protocol;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_unit_interval(const Observation& obs) {
  for (double v : obs) {
    ASSERT_TRUE(std::isfinite(v));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

}  // namespace

TEST(EncodeObservation, LayoutAndScaling) {
  const WorldConfig c;
  WorldState s = reset(c, 0);
  s.sensors[0].x = 50.0;
  s.sensors[0].y = 50.0;
  s.sensors[0].energy = 1.0;
  s.sensors[1].alive = false;
  s.sensors[1].energy = 0.0;
  const Observation obs = encode_observation(c, s);
  ASSERT_EQ(obs.size(), 305u);
  EXPECT_EQ(obs[0], 0.5);
  EXPECT_EQ(obs[1], 0.5);
  EXPECT_EQ(obs[2], 0.5);
  EXPECT_EQ(obs[5], 0.0);
  EXPECT_EQ(obs[300], 0.25);
  EXPECT_EQ(obs[301], 0.25);
  EXPECT_EQ(obs[302], 0.03);
  EXPECT_EQ(obs[303], 0.75);
  EXPECT_EQ(obs[304], 0.75);
  expect_unit_interval(obs);
}

TEST(DecodeAction, LinearScaling) {
  const WorldConfig c;
  const MoveCommand zero = decode_action({0.0, 0.0}, c);
  EXPECT_EQ(zero.theta, 0.0);
  EXPECT_EQ(zero.distance, 0.0);
  const MoveCommand half = decode_action({0.5, 1.0}, c);
  EXPECT_DOUBLE_EQ(half.theta, kPi);
  EXPECT_EQ(half.distance, c.d_move_max);
}

TEST(DecodeAction, OutOfRangeIsProtocolError) {
  const WorldConfig c;
  try {
    decode_action({1.1, 0.2}, c);
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("u_theta"), std::string::npos);
  }
  EXPECT_THROW(decode_action({0.2, -1e-9}, c), ProtocolError);
  EXPECT_THROW(decode_action({std::nan(""), 0.2}, c), ProtocolError);
}

TEST(DecodeAction, RoundTripProperty) {
  const WorldConfig c;
  Rng rng(77);
  for (int i = 0; i < 100000; ++i) {
    const MoveCommand cmd{rng.uniform01() * 2 * kPi, rng.uniform01() * c.d_move_max};
    const MoveCommand back = decode_action(encode_action(cmd, c), c);
    ASSERT_NEAR(back.theta, cmd.theta, 1e-12);
    ASSERT_NEAR(back.distance, cmd.distance, 1e-12);
  }
}

TEST(Session, SpecEchoesConfig) {
  Session session{WorldConfig{}};
  const json r = json::parse(session.handle_line(R"({"cmd":"spec"})"));
  EXPECT_EQ(r.at("obs_dim"), 305);
  EXPECT_EQ(r.at("n_agents"), 2);
  EXPECT_EQ(r.at("action_dim"), 2);
  EXPECT_EQ(r.at("action_low"), json::array({0, 0}));
  EXPECT_EQ(r.at("action_high"), json::array({1, 1}));
}

TEST(Session, ResetAndStepContract) {
  Session session{WorldConfig{}};
  const json reset_reply = json::parse(session.handle_line(R"({"cmd":"reset","seed":7})"));
  EXPECT_EQ(reset_reply.at("t"), 0);
  EXPECT_EQ(reset_reply.at("obs").size(), 305u);

  const json r = json::parse(
      session.handle_line(R"({"cmd":"step","actions":{"aav":[0.5,0.1],"sv":[0.25,0.0]}})"));
  EXPECT_EQ(r.at("obs").size(), 305u);
  EXPECT_FALSE(r.at("done").get<bool>());
  EXPECT_EQ(r.at("t"), 1);
  ASSERT_TRUE(r.at("rewards").contains("aav"));
  ASSERT_TRUE(r.at("rewards").contains("sv"));
  const json& info = r.at("info");
  EXPECT_NEAR(info.at("f2").at("aav").get<double>(), 1.0, 1e-12);
  EXPECT_EQ(info.at("f2").at("sv").get<double>(), 0.0);
  EXPECT_TRUE(info.at("f1").contains("aav"));
  EXPECT_TRUE(info.at("battery").contains("sv"));
  EXPECT_GE(info.at("f3").get<double>(), 0.0);
  EXPECT_LE(info.at("alive").get<int>(), 100);

  // The AAV moved pi rad for 1 m: x 25 -> 24.
  EXPECT_NEAR(r.at("obs")[300].get<double>(), 0.24, 1e-12);
}

TEST(Session, MatchesDirectWorldAndRoundTripsNumbers) {
  const WorldConfig c;
  Session session{c};
  session.handle_line(R"({"cmd":"reset","seed":3})");
  WorldState direct = reset(c, 3);
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const RawAction a{rng.uniform01(), rng.uniform01()};
    const RawAction b{rng.uniform01(), rng.uniform01()};
    json req = {{"cmd", "step"}, {"actions", {{"aav", {a.u_theta, a.u_d}}, {"sv", {b.u_theta, b.u_d}}}}};
    const json reply = json::parse(session.handle_line(req.dump()));
    const StepResult r = step(c, direct, {decode_action(a, c), decode_action(b, c)});
    EXPECT_EQ(reply.at("rewards").at("aav").get<double>(), r.metrics.rewards[0]);
    EXPECT_EQ(reply.at("rewards").at("sv").get<double>(), r.metrics.rewards[1]);
    EXPECT_EQ(reply.at("obs").get<std::vector<double>>(), encode_observation(c, direct));
  }
}

TEST(Session, ErrorResponses) {
  WorldConfig c;
  c.episode_len = 1;
  Session session{c};
  auto code = [&](std::string_view line) {
    const json r = json::parse(session.handle_line(line));
    EXPECT_TRUE(r.contains("error")) << line;
    return r.value("code", std::string{});
  };
  EXPECT_EQ(code("not json"), "parse_error");
  EXPECT_EQ(code("[1,2]"), "bad_request");
  EXPECT_EQ(code(R"({"cmd":42})"), "bad_request");
  EXPECT_EQ(code(R"({"cmd":"fly"})"), "unknown_cmd");
  EXPECT_EQ(code(R"({"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}})"), "no_episode");
  EXPECT_EQ(code(R"({"cmd":"reset","seed":-3})"), "bad_request");
  session.handle_line(R"({"cmd":"reset"})");
  EXPECT_EQ(code(R"({"cmd":"step"})"), "bad_request");
  EXPECT_EQ(code(R"({"cmd":"step","actions":{"aav":[0,0]}})"), "bad_request");
  EXPECT_EQ(code(R"({"cmd":"step","actions":{"aav":[1.1,0.2],"sv":[0,0]}})"), "bad_action");
  const json ok = json::parse(session.handle_line(R"({"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}})"));
  EXPECT_TRUE(ok.at("done").get<bool>());
  EXPECT_EQ(code(R"({"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}})"), "episode_done");
  // A fresh reset recovers the session.
  EXPECT_EQ(json::parse(session.handle_line(R"({"cmd":"reset","seed":1})")).at("t"), 0);
}

TEST(Session, FuzzedLinesNeverBreakTheSession) {
  Session session{WorldConfig{}};
  Rng rng(31337);
  const std::string fragments[] = {R"({"cmd":"step","actions":{"aav":[)", R"({"cmd":"reset","seed":)",
                                   "]}}", "0.5,", "1e308", "-", "\"", "{", "}", "null", "\xff\xfe",
                                   R"({"cmd":"spec"})", "\\u0000", "nan", "[[[[", ","};
  for (int i = 0; i < 10000; ++i) {
    std::string line;
    const int parts = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int p = 0; p < parts; ++p) {
      if (rng.uniform01() < 0.5) {
        line += fragments[rng.next_u64() % std::size(fragments)];
      } else {
        line += static_cast<char>(rng.next_u64() % 256);
      }
    }
    std::string reply;
    ASSERT_NO_THROW(reply = session.handle_line(line));
    const json parsed = json::parse(reply, nullptr, false);
    ASSERT_FALSE(parsed.is_discarded()) << reply;
    ASSERT_TRUE(parsed.is_object());
  }
  EXPECT_EQ(json::parse(session.handle_line(R"({"cmd":"spec"})")).at("obs_dim"), 305);
}

TEST(ServeStream, OneResponsePerLine) {
  std::istringstream in("{\"cmd\":\"spec\"}\n\n{\"cmd\":\"reset\",\"seed\":2}\r\nbogus\n"
                        "{\"cmd\":\"close\"}\n{\"cmd\":\"spec\"}\n");
  std::ostringstream out;
  serve_stream(WorldConfig{}, in, out);
  std::istringstream lines(out.str());
  std::vector<json> replies;
  for (std::string line; std::getline(lines, line);) replies.push_back(json::parse(line));
  ASSERT_EQ(replies.size(), 4u);  // blank skipped, nothing after close
  EXPECT_EQ(replies[0].at("obs_dim"), 305);
  EXPECT_EQ(replies[1].at("t"), 0);
  EXPECT_EQ(replies[2].at("code"), "parse_error");
  EXPECT_EQ(replies[3].at("ok"), true);
}

namespace {

class Client {
 public:
  explicit Client(int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) fd_ = -1;
  }
  ~Client() {
    if (fd_ >= 0) ::close(fd_);
  }
  bool connected() const { return fd_ >= 0; }

  json request(const std::string& line) {
    const std::string data = line + "\n";
    ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    while (buffer_.find('\n') == std::string::npos) {
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n <= 0) return json();
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
    const auto nl = buffer_.find('\n');
    const std::string reply = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    return json::parse(reply);
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace

TEST(TcpServer, IndependentConcurrentSessions) {
  WorldConfig c;
  c.n_sensors = 10;
  TcpServer server(c);
  const int port = server.bind(0);
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.run(); });

  {
    Client a(port);
    Client b(port);
    ASSERT_TRUE(a.connected());
    ASSERT_TRUE(b.connected());
    EXPECT_EQ(a.request(R"({"cmd":"spec"})").at("obs_dim"), 35);
    const json ra = a.request(R"({"cmd":"reset","seed":1})");
    const json rb = b.request(R"({"cmd":"reset","seed":2})");
    EXPECT_NE(ra.at("obs"), rb.at("obs"));
    EXPECT_EQ(b.request("garbage").at("code"), "parse_error");
    // Session b has its own world: stepping it leaves a at t=0.
    EXPECT_EQ(b.request(R"({"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}})").at("t"), 1);
    EXPECT_EQ(a.request(R"({"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}})").at("t"), 1);
    EXPECT_EQ(a.request(R"({"cmd":"close"})").at("ok"), true);
  }
  server.stop();
  loop.join();
}
