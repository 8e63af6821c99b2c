#ifndef WEBGCS_WEBGCS_H
#define WEBGCS_WEBGCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(WEBGCS_BUILDING_LIBRARY)
#define WEBGCS_API __attribute__((visibility("default")))
#else
#define WEBGCS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum webgcs_status {
  WEBGCS_OK = 0,
  WEBGCS_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad JSON, failed validation */
  WEBGCS_ERR_BAD_ADDRESS = 2,      /* unparseable vehicle or bind address */
  WEBGCS_ERR_CONFLICT = 3,         /* link swap while armed without force */
  WEBGCS_ERR_LINK_DOWN = 4,        /* no live vehicle link */
  WEBGCS_ERR_IO = 5,               /* socket bind/listen failed */
  WEBGCS_ERR_STATE = 6,            /* already started, not started */
  WEBGCS_ERR_BUFFER_TOO_SMALL = 7, /* output truncated; see *needed */
  WEBGCS_ERR_INTERNAL = 8
} webgcs_status;

/* Message for the last failing call on this thread; never NULL. */
WEBGCS_API const char* webgcs_last_error(void);
WEBGCS_API const char* webgcs_version(void);
WEBGCS_API const char* webgcs_status_string(webgcs_status status);

/* MAVLink X.25 checksum of data, continuing from seed (0xFFFF to start). */
WEBGCS_API uint16_t webgcs_crc_x25(const uint8_t* data, size_t len, uint16_t seed);

/* ---- ground station service (vehicle link + HTTP/WebSocket gateway) ---- */

typedef struct webgcs_service webgcs_service;

typedef struct webgcs_service_config {
  const char* bind_address; /* default "0.0.0.0" */
  uint16_t port;            /* default 5000; 0 picks a free port */
  const char* ui_dir;       /* static UI bundle; NULL serves a placeholder */
  double fence_radius_m;    /* default 100 */
  double fence_alt_m;       /* default 50 */
  const char* breach_action; /* "warn", "deny_only" or "auto_rtl" (default) */
  double takeoff_default_m; /* default 15.24 */
  int http_threads;         /* default 2 */
} webgcs_service_config;

WEBGCS_API void webgcs_service_config_init(webgcs_service_config* config);

WEBGCS_API webgcs_status webgcs_service_create(const webgcs_service_config* config, webgcs_service** out);
/* Binds the HTTP port and starts the background threads. */
WEBGCS_API webgcs_status webgcs_service_start(webgcs_service* service);
WEBGCS_API uint16_t webgcs_service_port(const webgcs_service* service);
WEBGCS_API void webgcs_service_stop(webgcs_service* service);
WEBGCS_API void webgcs_service_destroy(webgcs_service* service);

/* address: "tcp://host:port", "host:port" or "serial:/dev/ttyX[@baud]". */
WEBGCS_API webgcs_status webgcs_service_connect(webgcs_service* service, const char* address, int force);
WEBGCS_API webgcs_status webgcs_service_disconnect(webgcs_service* service);

/* Writes the state document (telemetry, link, fence) as a NUL-terminated
 * JSON string. *needed, when non-NULL, receives the full size including the
 * terminator. */
WEBGCS_API webgcs_status webgcs_service_state_json(webgcs_service* service, char* buf, size_t cap, size_t* needed);

/* Submits a command given as the JSON request body, e.g.
 * {"kind":"takeoff","alt_m":15.24}. On success *token identifies the
 * command; its outcome is published as a command_result event. */
WEBGCS_API webgcs_status webgcs_service_command_json(webgcs_service* service, const char* request_json,
                                                     uint64_t* token);

/* Outcome of a resolved command as JSON; WEBGCS_ERR_STATE while pending. */
WEBGCS_API webgcs_status webgcs_service_outcome_json(webgcs_service* service, uint64_t token, char* buf, size_t cap,
                                                     size_t* needed);

/* ---- simulated vehicle (MAVLink over TCP) ---- */

typedef struct webgcs_sim webgcs_sim;

typedef struct webgcs_sim_config {
  const char* bind_address; /* default "0.0.0.0" */
  uint16_t port;            /* default 5760; 0 picks a free port */
  double lat;               /* spawn point, default 33.6461 */
  double lon;               /* default -117.8427 */
  double time_scale;        /* default 1 */
  int ack_commands;         /* default 1; 0 makes the vehicle ignore commands */
  int deny_commands;        /* default 0; 1 refuses every command */
} webgcs_sim_config;

WEBGCS_API void webgcs_sim_config_init(webgcs_sim_config* config);
WEBGCS_API webgcs_status webgcs_sim_create(const webgcs_sim_config* config, webgcs_sim** out);
WEBGCS_API webgcs_status webgcs_sim_start(webgcs_sim* sim);
WEBGCS_API uint16_t webgcs_sim_port(const webgcs_sim* sim);
WEBGCS_API void webgcs_sim_stop(webgcs_sim* sim);
WEBGCS_API void webgcs_sim_destroy(webgcs_sim* sim);
/* Ground truth: position, altitude, phase, mode, armed. */
WEBGCS_API webgcs_status webgcs_sim_state_json(webgcs_sim* sim, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* WEBGCS_WEBGCS_H */
