#include "sage/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace sage {

namespace {

constexpr std::array<std::string_view, kStageCount> kAcronyms = {
    "SURFING",           "HOST_DISC",          "SERVICE_DISC",
    "VULN_DISC",         "INFO_DISC",          "USER_PRIV_ESC",
    "ROOT_PRIV_ESC",     "BRUTE_FORCE_CREDS",  "ACCT_MANIP",
    "PUBLIC_APP_EXP",    "REMOTE_SERVICE_EXP", "COMMAND_AND_CONTROL",
    "LATERAL_MOVEMENT",  "ARBITRARY_CODE_EXE", "PRIV_ESC",
    "NETWORK_DOS",       "RESOURCE_HIJACKING", "DATA_MANIPULATION",
    "DATA_EXFILTRATION", "DATA_DELIVERY",      "DATA_DESTRUCTION",
};

constexpr std::array<AttackStage, kStageCount> make_all_stages() {
  std::array<AttackStage, kStageCount> out{};
  for (std::size_t i = 0; i < kStageCount; ++i) out[i] = static_cast<AttackStage>(i);
  return out;
}

constexpr auto kAllStages = make_all_stages();

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  return std::from_chars(first, last, out).ec == std::errc{};
}

}  // namespace

Severity severity(AttackStage stage) noexcept {
  const auto idx = static_cast<std::size_t>(stage);
  if (idx <= static_cast<std::size_t>(AttackStage::INFO_DISC)) return Severity::Low;
  if (idx <= static_cast<std::size_t>(AttackStage::PRIV_ESC)) return Severity::Med;
  return Severity::High;
}

std::string_view acronym(AttackStage stage) noexcept {
  return kAcronyms[static_cast<std::size_t>(stage)];
}

std::string_view severity_name(Severity sev) noexcept {
  switch (sev) {
    case Severity::Low: return "Low";
    case Severity::Med: return "Med";
    case Severity::High: return "High";
  }
  return "Low";
}

std::optional<AttackStage> parse_stage(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kStageCount; ++i) {
    if (kAcronyms[i] == text) return static_cast<AttackStage>(i);
  }
  return std::nullopt;
}

const std::array<AttackStage, kStageCount>& all_stages() noexcept { return kAllStages; }

std::string to_string(const Symbol& sym) {
  std::string out(acronym(sym.mcat));
  out += '|';
  out += sym.service;
  return out;
}

std::optional<Symbol> parse_symbol(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) return std::nullopt;
  auto stage = parse_stage(text.substr(0, bar));
  if (!stage) return std::nullopt;
  auto service = text.substr(bar + 1);
  if (service.empty()) return std::nullopt;
  return Symbol{*stage, std::string(service)};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const auto tod = ts - day;
  const auto h = duration_cast<hours>(tod);
  const auto m = duration_cast<minutes>(tod - h);
  const auto s = duration_cast<seconds>(tod - h - m);
  const auto us = duration_cast<microseconds>(tod - h - m - s);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%06dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(us.count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept {
  using namespace std::chrono;
  int y, mo, d, hh, mi, ss;
  if (text.size() < 19) return std::nullopt;
  if (!read_int(text, 0, 4, y) || text[4] != '-' || !read_int(text, 5, 2, mo) ||
      text[7] != '-' || !read_int(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
      !read_int(text, 11, 2, hh) || text[13] != ':' || !read_int(text, 14, 2, mi) ||
      text[16] != ':' || !read_int(text, 17, 2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mi > 59 || ss > 60) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::size_t pos = 19;
  long long micros = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6) {
        micros = micros * 10 + (text[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (; digits < 6; ++digits) micros *= 10;
  }

  long long offset_minutes = 0;
  if (pos < text.size()) {
    const char sign = text[pos];
    if (sign == 'Z' && pos + 1 == text.size()) {
      pos = text.size();
    } else if (sign == '+' || sign == '-') {
      int oh, om;
      auto rest = text.substr(pos + 1);
      if (rest.size() == 4 && read_int(rest, 0, 2, oh) && read_int(rest, 2, 2, om)) {
      } else if (rest.size() == 5 && rest[2] == ':' && read_int(rest, 0, 2, oh) &&
                 read_int(rest, 3, 2, om)) {
      } else {
        return std::nullopt;
      }
      offset_minutes = (sign == '+' ? 1 : -1) * (oh * 60LL + om);
    } else {
      return std::nullopt;
    }
  }

  Timestamp ts = sys_days{ymd} + hours{hh} + minutes{mi} + seconds{ss} + microseconds{micros};
  return ts - minutes{offset_minutes};
}

double to_seconds(Duration d) noexcept { return static_cast<double>(d.count()) / 1e6; }

Duration from_seconds(double secs) noexcept {
  return Duration{static_cast<Duration::rep>(std::llround(secs * 1e6))};
}

}  // namespace sage
