#ifndef SAGE_TYPES_HPP
#define SAGE_TYPES_HPP

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sage {

/// UTC instant with microsecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Duration = std::chrono::microseconds;

/// Attack stages of the Action-Intent framework, ordered by severity tier.
enum class AttackStage : std::uint8_t {
  SURFING,
  HOST_DISC,
  SERVICE_DISC,
  VULN_DISC,
  INFO_DISC,
  USER_PRIV_ESC,
  ROOT_PRIV_ESC,
  BRUTE_FORCE_CREDS,
  ACCT_MANIP,
  PUBLIC_APP_EXP,
  REMOTE_SERVICE_EXP,
  COMMAND_AND_CONTROL,
  LATERAL_MOVEMENT,
  ARBITRARY_CODE_EXE,
  PRIV_ESC,
  NETWORK_DOS,
  RESOURCE_HIJACKING,
  DATA_MANIPULATION,
  DATA_EXFILTRATION,
  DATA_DELIVERY,
  DATA_DESTRUCTION,
};

inline constexpr std::size_t kStageCount = 21;

enum class Severity : std::uint8_t { Low, Med, High };

Severity severity(AttackStage stage) noexcept;
std::string_view acronym(AttackStage stage) noexcept;
std::string_view severity_name(Severity sev) noexcept;
std::optional<AttackStage> parse_stage(std::string_view text) noexcept;
const std::array<AttackStage, kStageCount>& all_stages() noexcept;

/// Alphabet element of the automaton: attack stage plus targeted service.
struct Symbol {
  AttackStage mcat{AttackStage::SURFING};
  std::string service;

  auto operator<=>(const Symbol&) const = default;
  bool operator==(const Symbol&) const = default;
};

/// Rendered as `MCAT_ACRONYM|service`.
std::string to_string(const Symbol& sym);
std::optional<Symbol> parse_symbol(std::string_view text);

/// Kernel selection for loops that have both a serial reference and an
/// OpenMP implementation. Both produce identical results.
enum class Execution { serial, parallel };

/// ISO-8601 UTC with six fractional digits, e.g. `2018-11-03T21:19:41.012345Z`.
std::string format_timestamp(Timestamp ts);

/// Accepts `YYYY-MM-DD[T ]HH:MM:SS[.ffffff][Z|+HHMM|+HH:MM|-HHMM|-HH:MM]`.
std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept;

double to_seconds(Duration d) noexcept;
Duration from_seconds(double secs) noexcept;

}  // namespace sage

#endif  // SAGE_TYPES_HPP
