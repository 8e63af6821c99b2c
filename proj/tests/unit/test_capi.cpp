#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstring>
#include <string>
#include <thread>

#include "webgcs/webgcs.h"

using nlohmann::json;
using namespace std::chrono_literals;

namespace {

template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

json service_state(webgcs_service* s) {
  size_t needed = 0;
  REQUIRE(webgcs_service_state_json(s, nullptr, 0, &needed) == WEBGCS_ERR_BUFFER_TOO_SMALL);
  // The document can grow between calls; leave headroom.
  std::string buf(needed + 4096, '\0');
  REQUIRE(webgcs_service_state_json(s, buf.data(), buf.size(), &needed) == WEBGCS_OK);
  buf.resize(needed - 1);
  return json::parse(buf);
}

json sim_state(webgcs_sim* s) {
  std::string buf(4096, '\0');
  size_t needed = 0;
  REQUIRE(webgcs_sim_state_json(s, buf.data(), buf.size(), &needed) == WEBGCS_OK);
  buf.resize(needed - 1);
  return json::parse(buf);
}

}  // namespace

TEST_CASE("library basics") {
  CHECK(std::strlen(webgcs_version()) > 0);
  CHECK(std::string(webgcs_status_string(WEBGCS_ERR_LINK_DOWN)) == "link down");
  const char* check = "123456789";
  CHECK(webgcs_crc_x25(reinterpret_cast<const uint8_t*>(check), 9, 0xFFFF) == 0x6F91);
  CHECK(webgcs_crc_x25(nullptr, 0, 0xFFFF) == 0xFFFF);
}

TEST_CASE("argument checking") {
  CHECK(webgcs_service_create(nullptr, nullptr) == WEBGCS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(webgcs_last_error()) > 0);

  webgcs_service_config c;
  webgcs_service_config_init(&c);
  CHECK(c.port == 5000);
  CHECK(c.fence_radius_m == 100.0);
  CHECK(c.takeoff_default_m == 15.24);
  webgcs_service* s = nullptr;
  c.fence_radius_m = -3.0;
  CHECK(webgcs_service_create(&c, &s) == WEBGCS_ERR_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  webgcs_service_config_init(&c);
  c.breach_action = "explode";
  CHECK(webgcs_service_create(&c, &s) == WEBGCS_ERR_INVALID_ARGUMENT);

  webgcs_sim_config sc;
  webgcs_sim_config_init(&sc);
  CHECK(sc.port == 5760);
  sc.lat = 123.0;
  webgcs_sim* sim = nullptr;
  CHECK(webgcs_sim_create(&sc, &sim) == WEBGCS_ERR_INVALID_ARGUMENT);

  webgcs_service_destroy(nullptr);
  webgcs_sim_destroy(nullptr);
  CHECK(webgcs_service_state_json(nullptr, nullptr, 0, nullptr) == WEBGCS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("service and simulator through the C interface") {
  webgcs_sim_config sc;
  webgcs_sim_config_init(&sc);
  sc.bind_address = "127.0.0.1";
  sc.port = 0;
  sc.time_scale = 5.0;
  webgcs_sim* sim = nullptr;
  REQUIRE(webgcs_sim_create(&sc, &sim) == WEBGCS_OK);
  REQUIRE(webgcs_sim_start(sim) == WEBGCS_OK);
  CHECK(webgcs_sim_start(sim) == WEBGCS_ERR_STATE);
  REQUIRE(webgcs_sim_port(sim) != 0);

  webgcs_service_config c;
  webgcs_service_config_init(&c);
  c.bind_address = "127.0.0.1";
  c.port = 0;
  webgcs_service* s = nullptr;
  REQUIRE(webgcs_service_create(&c, &s) == WEBGCS_OK);
  REQUIRE(webgcs_service_start(s) == WEBGCS_OK);
  CHECK(webgcs_service_start(s) == WEBGCS_ERR_STATE);
  const uint16_t port = webgcs_service_port(s);
  REQUIRE(port != 0);

  uint64_t token = 0;
  CHECK(webgcs_service_command_json(s, R"({"kind":"arm"})", &token) == WEBGCS_ERR_LINK_DOWN);
  CHECK(webgcs_service_command_json(s, "{oops", &token) == WEBGCS_ERR_INVALID_ARGUMENT);
  CHECK(webgcs_service_command_json(s, R"({"kind":"takeoff","alt_m":-5})", &token) == WEBGCS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(webgcs_last_error()).find("alt_m") != std::string::npos);
  CHECK(webgcs_service_connect(s, "notanaddress", 0) == WEBGCS_ERR_BAD_ADDRESS);

  const std::string addr = "tcp://127.0.0.1:" + std::to_string(webgcs_sim_port(sim));
  REQUIRE(webgcs_service_connect(s, addr.c_str(), 0) == WEBGCS_OK);
  REQUIRE(eventually([&] { return service_state(s)["link"]["phase"] == "connected"; }, 5000ms));

  // The HTTP side of the same service answers too.
  httplib::Client http("127.0.0.1", port);
  auto r = http.Get("/api/state");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["link"]["phase"] == "connected");

  REQUIRE(webgcs_service_command_json(s, R"({"kind":"arm"})", &token) == WEBGCS_OK);
  CHECK(token != 0);
  std::string out(1024, '\0');
  size_t needed = 0;
  REQUIRE(eventually([&] { return webgcs_service_outcome_json(s, token, out.data(), out.size(), &needed) == WEBGCS_OK; },
                     3000ms));
  out.resize(needed - 1);
  CHECK(json::parse(out)["status"] == "ACCEPTED");
  REQUIRE(eventually([&] { return sim_state(sim)["armed"] == true; }, 2000ms));
  REQUIRE(eventually([&] { return service_state(s)["telemetry"]["armed"] == true; }, 3000ms));
  CHECK(webgcs_service_connect(s, addr.c_str(), 0) == WEBGCS_ERR_CONFLICT);

  CHECK(webgcs_service_disconnect(s) == WEBGCS_OK);
  CHECK(service_state(s)["link"]["phase"] == "disconnected");
  webgcs_service_destroy(s);
  webgcs_sim_destroy(sim);
}
