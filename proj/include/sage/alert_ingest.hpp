#ifndef SAGE_ALERT_INGEST_HPP
#define SAGE_ALERT_INGEST_HPP

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/types.hpp"

namespace sage {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AlertFormat { eve_json, csv };

std::optional<AlertFormat> parse_format(std::string_view text) noexcept;

/// One IDS event as read from the log, before stage/service mapping.
struct RawAlert {
  Timestamp timestamp;
  std::string src_ip;
  std::string dst_ip;
  std::uint16_t dst_port = 0;
  std::string signature;
  std::string category;
};

/// `total` counts non-blank records (CSV header excluded).
/// `ignored` holds well-formed records that are not alerts (EVE flow, dns, ...).
struct ParseStats {
  std::size_t total = 0;
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t ignored = 0;

  ParseStats& operator+=(const ParseStats& other) noexcept;
  bool operator==(const ParseStats&) const = default;
};

struct ParseResult {
  std::vector<RawAlert> alerts;
  ParseStats stats;
};

/// Reads alerts in input order. Malformed records are skipped and counted;
/// a stream that cannot be read throws IngestError.
///
/// CSV layout: header `timestamp,src_ip,dest_ip,dest_port,signature,category`
/// (columns located by name, `category` optional); fields may be double-quoted.
/// The timestamp column accepts ISO-8601 or fractional epoch seconds.
ParseResult parse_alerts(std::istream& source, AlertFormat format);

/// Parses every file (in parallel when requested), concatenates in argument
/// order and stable-sorts by timestamp.
ParseResult parse_alert_files(std::span<const std::filesystem::path> paths, AlertFormat format,
                              Execution exec = Execution::parallel);

/// Mapped alert: attacker/victim plus attack stage and targeted service.
struct Alert {
  Timestamp timestamp;
  std::string attacker;
  std::string victim;
  AttackStage mcat{AttackStage::SURFING};
  std::string tserv;

  bool operator==(const Alert&) const = default;
};

struct SignatureRule {
  enum class Kind { substring, exact, catch_all };
  Kind kind = Kind::substring;
  std::string pattern;
  AttackStage stage{AttackStage::SURFING};

  bool matches(std::string_view text) const noexcept;
};

inline constexpr AttackStage kCatchAllStage = AttackStage::SURFING;
inline constexpr std::string_view kUnknownService = "unknown";

/// Signature rules and the port registry. The first rule matching the
/// signature wins; only when none does are the rules tried against the
/// category, and then the catch-all applies. A catch-all mapping to SURFING
/// is appended when the supplied rules lack one.
class MappingConfig {
 public:
  MappingConfig() : MappingConfig(std::vector<SignatureRule>{}, {}) {}
  MappingConfig(std::vector<SignatureRule> rules, std::map<std::uint16_t, std::string> port_service);

  /// Rule file: one `PATTERN<TAB>STAGE_ACRONYM` per line. `#` starts a comment
  /// line, a pattern `*` is the catch-all, `=text` requires an exact match.
  static std::vector<SignatureRule> load_rules(std::istream& in);
  static std::vector<SignatureRule> load_rules(const std::filesystem::path& path);

  /// IANA service-names CSV; columns located by the `Service Name` and
  /// `Port Number` headers. The first named entry for a port wins, ranges
  /// `a-b` expand.
  static std::map<std::uint16_t, std::string> load_port_registry(std::istream& in);
  static std::map<std::uint16_t, std::string> load_port_registry(const std::filesystem::path& path);

  static MappingConfig from_files(const std::filesystem::path& rules,
                                  const std::filesystem::path& registry);

  const std::vector<SignatureRule>& rules() const noexcept { return rules_; }
  const std::map<std::uint16_t, std::string>& port_service() const noexcept { return ports_; }

  AttackStage stage_for(std::string_view signature, std::string_view category) const noexcept;
  std::string service_for(std::uint16_t port) const;

 private:
  std::vector<SignatureRule> rules_;
  std::map<std::uint16_t, std::string> ports_;
};

Alert map_alert(const RawAlert& raw, const MappingConfig& cfg);

/// Stable sort by timestamp.
void sort_by_time(std::vector<Alert>& alerts);

/// Drops an alert iff the last retained alert with the same
/// (attacker, victim, mcat, tserv) lies strictly less than `t_seconds` before
/// it. Throws std::invalid_argument on unsorted input or t <= 0.
std::vector<Alert> filter_duplicates(std::span<const Alert> alerts, double t_seconds);

}  // namespace sage

#endif  // SAGE_ALERT_INGEST_HPP
