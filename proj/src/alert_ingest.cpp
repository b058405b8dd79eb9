#include "sage/alert_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "csv.hpp"

namespace sage {

namespace {

using nlohmann::json;
using detail::split_csv;
using detail::trim;

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::optional<std::uint16_t> parse_port(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::uint16_t{0};
  unsigned long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > 65535) return std::nullopt;
  return static_cast<std::uint16_t>(value);
}

std::optional<Timestamp> parse_epoch_seconds(std::string_view text) {
  const auto dot = text.find('.');
  auto whole = text.substr(0, dot);
  long long secs = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), secs);
  if (whole.empty() || ec != std::errc{} || ptr != whole.data() + whole.size()) return std::nullopt;
  long long micros = 0;
  if (dot != std::string_view::npos) {
    auto frac = text.substr(dot + 1);
    if (frac.empty()) return std::nullopt;
    int digits = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
      if (digits < 6) {
        micros = micros * 10 + (c - '0');
        ++digits;
      }
    }
    for (; digits < 6; ++digits) micros *= 10;
  }
  if (secs < 0) return std::nullopt;
  return Timestamp{Duration{secs * 1'000'000LL + micros}};
}

std::optional<Timestamp> parse_any_timestamp(std::string_view text) {
  text = trim(text);
  if (auto ts = parse_timestamp(text)) return ts;
  return parse_epoch_seconds(text);
}

enum class RecordOutcome { parsed, skipped, ignored };

RecordOutcome parse_eve_record(std::string_view line, RawAlert& out) {
  json rec = json::parse(line.begin(), line.end(), nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) return RecordOutcome::skipped;
  auto et = rec.find("event_type");
  if (et == rec.end() || !et->is_string()) return RecordOutcome::skipped;
  if (et->get_ref<const std::string&>() != "alert") return RecordOutcome::ignored;

  auto ts = rec.find("timestamp");
  auto src = rec.find("src_ip");
  auto dst = rec.find("dest_ip");
  auto alert = rec.find("alert");
  if (ts == rec.end() || !ts->is_string() || src == rec.end() || !src->is_string() ||
      dst == rec.end() || !dst->is_string() || alert == rec.end() || !alert->is_object()) {
    return RecordOutcome::skipped;
  }
  auto sig = alert->find("signature");
  if (sig == alert->end() || !sig->is_string()) return RecordOutcome::skipped;

  auto when = parse_timestamp(ts->get_ref<const std::string&>());
  if (!when) return RecordOutcome::skipped;

  std::uint16_t port = 0;
  if (auto p = rec.find("dest_port"); p != rec.end() && !p->is_null()) {
    if (!p->is_number_integer()) return RecordOutcome::skipped;
    const auto v = p->get<long long>();
    if (v < 0 || v > 65535) return RecordOutcome::skipped;
    port = static_cast<std::uint16_t>(v);
  }

  out.timestamp = *when;
  out.src_ip = src->get<std::string>();
  out.dst_ip = dst->get<std::string>();
  out.dst_port = port;
  out.signature = sig->get<std::string>();
  out.category.clear();
  if (auto cat = alert->find("category"); cat != alert->end() && cat->is_string()) {
    out.category = cat->get<std::string>();
  }
  if (out.src_ip.empty() || out.dst_ip.empty()) return RecordOutcome::skipped;
  return RecordOutcome::parsed;
}

struct CsvColumns {
  std::size_t timestamp, src, dst, port, signature;
  std::optional<std::size_t> category;
};

CsvColumns locate_columns(std::string_view header) {
  auto fields = split_csv(header);
  if (!fields) throw IngestError("malformed CSV header");
  auto find = [&](std::initializer_list<std::string_view> names) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < fields->size(); ++i) {
      const auto name = trim((*fields)[i]);
      for (auto n : names) {
        if (name == n) return i;
      }
    }
    return std::nullopt;
  };
  auto ts = find({"timestamp"});
  auto src = find({"src_ip"});
  auto dst = find({"dest_ip", "dst_ip"});
  auto port = find({"dest_port", "dst_port"});
  auto sig = find({"signature"});
  if (!ts || !src || !dst || !port || !sig) {
    throw IngestError(
        "CSV header must name timestamp, src_ip, dest_ip, dest_port and signature columns");
  }
  return {*ts, *src, *dst, *port, *sig, find({"category"})};
}

bool parse_csv_record(std::string_view line, const CsvColumns& cols, RawAlert& out) {
  auto fields = split_csv(line);
  if (!fields) return false;
  const std::size_t needed =
      std::max({cols.timestamp, cols.src, cols.dst, cols.port, cols.signature}) + 1;
  if (fields->size() < needed) return false;
  auto when = parse_any_timestamp((*fields)[cols.timestamp]);
  auto port = parse_port((*fields)[cols.port]);
  if (!when || !port) return false;
  out.timestamp = *when;
  out.src_ip = std::string(trim((*fields)[cols.src]));
  out.dst_ip = std::string(trim((*fields)[cols.dst]));
  out.dst_port = *port;
  out.signature = (*fields)[cols.signature];
  out.category = (cols.category && *cols.category < fields->size()) ? (*fields)[*cols.category] : "";
  return !out.src_ip.empty() && !out.dst_ip.empty();
}

std::vector<std::uint16_t> expand_ports(std::string_view text) {
  text = trim(text);
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    auto p = parse_port(text);
    if (!p || text.empty()) return {};
    return {*p};
  }
  auto lo = parse_port(text.substr(0, dash));
  auto hi = parse_port(text.substr(dash + 1));
  if (!lo || !hi || *lo > *hi) return {};
  std::vector<std::uint16_t> out;
  for (unsigned p = *lo; p <= *hi; ++p) out.push_back(static_cast<std::uint16_t>(p));
  return out;
}

}  // namespace

std::optional<AlertFormat> parse_format(std::string_view text) noexcept {
  if (text == "eve-json") return AlertFormat::eve_json;
  if (text == "csv") return AlertFormat::csv;
  return std::nullopt;
}

ParseStats& ParseStats::operator+=(const ParseStats& other) noexcept {
  total += other.total;
  parsed += other.parsed;
  skipped += other.skipped;
  ignored += other.ignored;
  return *this;
}

ParseResult parse_alerts(std::istream& source, AlertFormat format) {
  if (!source) throw IngestError("alert source is not readable");
  ParseResult result;
  std::string line;
  std::optional<CsvColumns> columns;
  while (std::getline(source, line)) {
    if (is_blank(line)) continue;
    if (format == AlertFormat::csv && !columns) {
      columns = locate_columns(line);
      continue;
    }
    ++result.stats.total;
    RawAlert raw;
    RecordOutcome outcome;
    if (format == AlertFormat::eve_json) {
      outcome = parse_eve_record(line, raw);
    } else {
      outcome = parse_csv_record(line, *columns, raw) ? RecordOutcome::parsed : RecordOutcome::skipped;
    }
    switch (outcome) {
      case RecordOutcome::parsed:
        ++result.stats.parsed;
        result.alerts.push_back(std::move(raw));
        break;
      case RecordOutcome::skipped: ++result.stats.skipped; break;
      case RecordOutcome::ignored: ++result.stats.ignored; break;
    }
  }
  if (source.bad()) throw IngestError("read error on alert source");
  return result;
}

ParseResult parse_alert_files(std::span<const std::filesystem::path> paths, AlertFormat format,
                              Execution exec) {
  std::vector<ParseResult> parts(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  const auto n = static_cast<long>(paths.size());
  auto parse_one = [&](long i) {
    try {
      std::ifstream in(paths[i], std::ios::binary);
      if (!in) throw IngestError("cannot open alert file: " + paths[i].string());
      parts[i] = parse_alerts(in, format);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) parse_one(i);
  } else {
    for (long i = 0; i < n; ++i) parse_one(i);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  ParseResult merged;
  for (auto& part : parts) {
    merged.stats += part.stats;
    std::move(part.alerts.begin(), part.alerts.end(), std::back_inserter(merged.alerts));
  }
  std::stable_sort(merged.alerts.begin(), merged.alerts.end(),
                   [](const RawAlert& a, const RawAlert& b) { return a.timestamp < b.timestamp; });
  return merged;
}

bool SignatureRule::matches(std::string_view text) const noexcept {
  switch (kind) {
    case Kind::catch_all: return true;
    case Kind::exact: return text == pattern;
    case Kind::substring: return text.find(pattern) != std::string_view::npos;
  }
  return false;
}

MappingConfig::MappingConfig(std::vector<SignatureRule> rules,
                             std::map<std::uint16_t, std::string> port_service)
    : rules_(std::move(rules)), ports_(std::move(port_service)) {
  const bool has_catch_all = std::any_of(rules_.begin(), rules_.end(), [](const SignatureRule& r) {
    return r.kind == SignatureRule::Kind::catch_all;
  });
  if (!has_catch_all) {
    rules_.push_back({SignatureRule::Kind::catch_all, "*", kCatchAllStage});
  }
}

std::vector<SignatureRule> MappingConfig::load_rules(std::istream& in) {
  std::vector<SignatureRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || trim(line).front() == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw IngestError("rule line " + std::to_string(lineno) + ": expected PATTERN<TAB>STAGE");
    }
    std::string_view pattern(line.data(), tab);
    auto stage = parse_stage(trim(std::string_view(line).substr(tab + 1)));
    if (!stage) {
      throw IngestError("rule line " + std::to_string(lineno) + ": unknown stage acronym");
    }
    SignatureRule rule;
    rule.stage = *stage;
    if (pattern == "*") {
      rule.kind = SignatureRule::Kind::catch_all;
      rule.pattern = "*";
    } else if (!pattern.empty() && pattern.front() == '=') {
      rule.kind = SignatureRule::Kind::exact;
      rule.pattern = std::string(pattern.substr(1));
    } else {
      if (pattern.empty()) throw IngestError("rule line " + std::to_string(lineno) + ": empty pattern");
      rule.kind = SignatureRule::Kind::substring;
      rule.pattern = std::string(pattern);
    }
    rules.push_back(std::move(rule));
  }
  if (in.bad()) throw IngestError("read error on signature rule file");
  return rules;
}

std::vector<SignatureRule> MappingConfig::load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open signature rule file: " + path.string());
  return load_rules(in);
}

std::map<std::uint16_t, std::string> MappingConfig::load_port_registry(std::istream& in) {
  std::map<std::uint16_t, std::string> ports;
  std::string line;
  std::optional<std::pair<std::size_t, std::size_t>> cols;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    auto fields = split_csv(line);
    if (!fields) continue;
    if (!cols) {
      std::optional<std::size_t> name_col, port_col;
      for (std::size_t i = 0; i < fields->size(); ++i) {
        const auto f = trim((*fields)[i]);
        if (f == "Service Name") name_col = i;
        if (f == "Port Number") port_col = i;
      }
      if (!name_col || !port_col) {
        throw IngestError("port registry header must contain 'Service Name' and 'Port Number'");
      }
      cols = {*name_col, *port_col};
      continue;
    }
    if (fields->size() <= std::max(cols->first, cols->second)) continue;
    const auto name = trim((*fields)[cols->first]);
    if (name.empty()) continue;
    for (auto port : expand_ports((*fields)[cols->second])) {
      ports.try_emplace(port, std::string(name));
    }
  }
  if (in.bad()) throw IngestError("read error on port registry");
  return ports;
}

std::map<std::uint16_t, std::string> MappingConfig::load_port_registry(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open port registry: " + path.string());
  return load_port_registry(in);
}

MappingConfig MappingConfig::from_files(const std::filesystem::path& rules,
                                        const std::filesystem::path& registry) {
  return MappingConfig(load_rules(rules), load_port_registry(registry));
}

AttackStage MappingConfig::stage_for(std::string_view signature,
                                     std::string_view category) const noexcept {
  for (const auto& rule : rules_) {
    if (rule.kind != SignatureRule::Kind::catch_all && rule.matches(signature)) return rule.stage;
  }
  if (!category.empty()) {
    for (const auto& rule : rules_) {
      if (rule.kind != SignatureRule::Kind::catch_all && rule.matches(category)) return rule.stage;
    }
  }
  for (const auto& rule : rules_) {
    if (rule.kind == SignatureRule::Kind::catch_all) return rule.stage;
  }
  return kCatchAllStage;  // unreachable: the constructor guarantees a catch-all
}

std::string MappingConfig::service_for(std::uint16_t port) const {
  auto it = ports_.find(port);
  return it == ports_.end() ? std::string(kUnknownService) : it->second;
}

Alert map_alert(const RawAlert& raw, const MappingConfig& cfg) {
  return Alert{raw.timestamp, raw.src_ip, raw.dst_ip, cfg.stage_for(raw.signature, raw.category),
               cfg.service_for(raw.dst_port)};
}

void sort_by_time(std::vector<Alert>& alerts) {
  std::stable_sort(alerts.begin(), alerts.end(),
                   [](const Alert& a, const Alert& b) { return a.timestamp < b.timestamp; });
}

namespace {

struct AlertKey {
  std::string_view attacker, victim;
  AttackStage mcat;
  std::string_view tserv;
  bool operator==(const AlertKey&) const = default;
};

struct AlertKeyHash {
  std::size_t operator()(const AlertKey& k) const noexcept {
    std::hash<std::string_view> h;
    std::size_t seed = h(k.attacker);
    auto mix = [&seed](std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); };
    mix(h(k.victim));
    mix(static_cast<std::size_t>(k.mcat));
    mix(h(k.tserv));
    return seed;
  }
};

}  // namespace

std::vector<Alert> filter_duplicates(std::span<const Alert> alerts, double t_seconds) {
  if (!(t_seconds > 0)) throw std::invalid_argument("filter_duplicates: t must be positive");
  for (std::size_t i = 1; i < alerts.size(); ++i) {
    if (alerts[i].timestamp < alerts[i - 1].timestamp) {
      throw std::invalid_argument("filter_duplicates: alerts are not sorted by timestamp");
    }
  }
  const Duration window = from_seconds(t_seconds);
  std::unordered_map<AlertKey, Timestamp, AlertKeyHash> last_kept;
  std::vector<Alert> out;
  out.reserve(alerts.size());
  for (const auto& a : alerts) {
    AlertKey key{a.attacker, a.victim, a.mcat, a.tserv};
    auto it = last_kept.find(key);
    if (it != last_kept.end() && a.timestamp - it->second < window) continue;
    last_kept.insert_or_assign(key, a.timestamp);
    out.push_back(a);
  }
  return out;
}

}  // namespace sage
