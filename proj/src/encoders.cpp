#include "flucid/encoders.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <map>
#include <regex>
#include <sstream>

#include "flucid/value.hpp"

namespace flucid::encoders {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool all_hex(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

const char* const month_abbr[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
const char* const month_full[] = {"january", "february", "march",     "april",   "may",      "june",
                                  "july",    "august",   "september", "october", "november", "december"};
const char* const day_abbr[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

std::optional<int> month_of(std::string_view s) {
  std::string l = lower(s);
  if (!l.empty() && l.back() == '.') l.pop_back();
  for (int m = 0; m < 12; ++m) {
    if (l == month_full[m]) return m + 1;
    if (l == lower(month_abbr[m])) return m + 1;
  }
  if (l == "sept") return 9;
  return std::nullopt;
}

bool is_weekday(std::string_view s) {
  std::string l = lower(s);
  if (!l.empty() && l.back() == ',') l.pop_back();
  for (const char* d : day_abbr)
    if (l == lower(d)) return true;
  static const char* const full[] = {"sunday", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday"};
  for (const char* d : full)
    if (l == d) return true;
  return false;
}

struct Civil {
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
};

// UTC epoch of a civil time; nullopt when a field is out of range
std::optional<std::int64_t> to_epoch(const Civil& c) {
  if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour < 0 || c.hour > 23 || c.minute < 0 ||
      c.minute > 59 || c.second < 0 || c.second > 59)
    return std::nullopt;
  std::tm tm{};
  tm.tm_year = c.year - 1900;
  tm.tm_mon = c.month - 1;
  tm.tm_mday = c.day;
  tm.tm_hour = c.hour;
  tm.tm_min = c.minute;
  tm.tm_sec = c.second;
  std::time_t t = timegm(&tm);
  std::tm back{};
  gmtime_r(&t, &back);
  if (back.tm_mday != c.day || back.tm_mon != c.month - 1) return std::nullopt;  // e.g. Feb 30
  return static_cast<std::int64_t>(t);
}

bool parse_clock(std::string_view s, Civil& c, int* micros = nullptr) {
  auto parts = split(s, ':');
  if (parts.size() < 2 || parts.size() > 3) return false;
  if (!all_digits(parts[0]) || !all_digits(parts[1]) || parts[0].size() > 2 || parts[1].size() != 2) return false;
  c.hour = std::stoi(parts[0]);
  c.minute = std::stoi(parts[1]);
  c.second = 0;
  if (parts.size() == 3) {
    std::string sec = parts[2];
    auto dot = sec.find('.');
    std::string frac;
    if (dot != std::string::npos) {
      frac = sec.substr(dot + 1);
      sec = sec.substr(0, dot);
      if (!all_digits(frac)) return false;
      if (micros) *micros = std::stoi(frac.substr(0, 6));
    }
    if (!all_digits(sec) || sec.size() != 2) return false;
    c.second = std::stoi(sec);
  }
  return true;
}

int current_year() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  return tm.tm_year + 1900;
}

[[noreturn]] void bad_timestamp(std::string_view s, const std::string& why = "unrecognized timestamp format") {
  throw NormalizeError(why + ": \"" + std::string(s) + "\"", std::string(s));
}

}  // namespace

std::string normalize_mac(std::string_view raw) {
  std::string s = trim(raw);
  std::vector<std::string> octets;
  auto fail = [&]() -> std::string { throw NormalizeError("unrecognized MAC address: \"" + s + "\"", s); };
  if (s.size() == 12 && all_hex(s)) {
    for (int i = 0; i < 6; ++i) octets.push_back(s.substr(static_cast<std::size_t>(2 * i), 2));
  } else if (s.find(':') != std::string::npos || s.find('-') != std::string::npos) {
    char sep = s.find(':') != std::string::npos ? ':' : '-';
    auto parts = split(s, sep);
    if (parts.size() != 6) return fail();
    for (auto& p : parts) {
      if (p.empty() || p.size() > 2 || !all_hex(p)) return fail();
      octets.push_back(p.size() == 1 ? "0" + p : p);
    }
  } else if (s.find('.') != std::string::npos) {
    auto parts = split(s, '.');
    if (parts.size() != 3) return fail();
    for (auto& p : parts) {
      if (p.empty() || p.size() > 4 || !all_hex(p)) return fail();
      std::string q = std::string(4 - p.size(), '0') + p;
      octets.push_back(q.substr(0, 2));
      octets.push_back(q.substr(2, 2));
    }
  } else {
    return fail();
  }
  std::string out;
  for (std::size_t i = 0; i < octets.size(); ++i) {
    if (i) out += ':';
    out += lower(octets[i]);
  }
  return out;
}

std::string default_zone() {
  const char* z = std::getenv("FLUCID_TZ");
  return z && *z ? std::string(z) : std::string("UTC");
}

std::optional<std::int64_t> zone_offset(std::string_view zone) {
  static const std::map<std::string, int> named = {
      {"utc", 0},   {"gmt", 0},   {"z", 0},     {"ut", 0},    {"est", -5},  {"edt", -4}, {"cst", -6},
      {"cdt", -5},  {"mst", -7},  {"mdt", -6},  {"pst", -8},  {"pdt", -7},  {"akst", -9}, {"akdt", -8},
      {"hst", -10}, {"ast", -4},  {"adt", -3},  {"nst", -3},  {"bst", 1},   {"cet", 1},  {"cest", 2}};
  std::string z = lower(trim(zone));
  if (auto it = named.find(z); it != named.end()) return std::int64_t{it->second} * 3600;
  if (z.size() >= 2 && (z[0] == '+' || z[0] == '-')) {
    std::string digits;
    for (char c : z.substr(1))
      if (c != ':') digits += c;
    if (!all_digits(digits)) return std::nullopt;
    int h = 0, m = 0;
    if (digits.size() <= 2) {
      h = std::stoi(digits);
    } else if (digits.size() == 4) {
      h = std::stoi(digits.substr(0, 2));
      m = std::stoi(digits.substr(2));
    } else {
      return std::nullopt;
    }
    if (h > 14 || m > 59) return std::nullopt;
    std::int64_t off = h * 3600 + m * 60;
    return z[0] == '-' ? -off : off;
  }
  return std::nullopt;
}

std::string format_timestamp(std::int64_t epoch, std::string_view zone) {
  auto off = zone_offset(zone);
  if (!off) throw NormalizeError("unknown time zone \"" + std::string(zone) + "\"", std::string(zone));
  std::time_t t = static_cast<std::time_t>(epoch + *off);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %s %d %02d:%02d:%02d %d", day_abbr[tm.tm_wday], month_abbr[tm.tm_mon], tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, tm.tm_year + 1900);
  return buf;
}

Timestamp normalize_timestamp(std::string_view input, std::optional<int> reference_year,
                              std::optional<std::string> zone) {
  std::string s = trim(input);
  std::string zname = zone ? *zone : default_zone();
  auto zoff = zone_offset(zname);
  if (!zoff) throw NormalizeError("unknown time zone \"" + zname + "\"", zname);
  Civil c;
  std::optional<std::int64_t> explicit_offset;
  auto finish = [&]() -> Timestamp {
    auto e = to_epoch(c);
    if (!e) bad_timestamp(s, "timestamp out of range");
    std::int64_t epoch = *e - (explicit_offset ? *explicit_offset : *zoff);
    return Timestamp{format_timestamp(epoch, zname), epoch};
  };
  if (s.empty()) bad_timestamp(s);

  // plain digits: compact YYYYMMDDHHMM[SS] or epoch seconds
  if (all_digits(s) || (s[0] == '-' && all_digits(s.substr(1)))) {
    if (s.size() == 12 || s.size() == 14) {
      c.year = std::stoi(s.substr(0, 4));
      c.month = std::stoi(s.substr(4, 2));
      c.day = std::stoi(s.substr(6, 2));
      c.hour = std::stoi(s.substr(8, 2));
      c.minute = std::stoi(s.substr(10, 2));
      c.second = s.size() == 14 ? std::stoi(s.substr(12, 2)) : 0;
      return finish();
    }
    std::int64_t epoch = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), epoch);
    if (ec != std::errc() || p != s.data() + s.size()) bad_timestamp(s);
    return Timestamp{format_timestamp(epoch, zname), epoch};
  }

  // ISO: YYYY-MM-DD[ T]HH:MM[:SS[.ffffff]][ ZONE | Z | +hh:mm]
  static const std::regex iso(R"(^(\d{4})-(\d{2})-(\d{2})[ T](\d{1,2}:\d{2}(?::\d{2}(?:\.\d+)?)?)\s*(Z|[A-Za-z]{1,5}|[+-]\d{2}:?\d{2})?$)");
  std::smatch m;
  if (std::regex_match(s, m, iso)) {
    c.year = std::stoi(m[1]);
    c.month = std::stoi(m[2]);
    c.day = std::stoi(m[3]);
    if (!parse_clock(m[4].str(), c)) bad_timestamp(s);
    if (m[5].matched) {
      explicit_offset = zone_offset(m[5].str());
      if (!explicit_offset) bad_timestamp(s, "unknown time zone");
    }
    return finish();
  }
  static const std::regex iso_date(R"(^(\d{4})-(\d{2})-(\d{2})$)");
  if (std::regex_match(s, m, iso_date)) {
    c.year = std::stoi(m[1]);
    c.month = std::stoi(m[2]);
    c.day = std::stoi(m[3]);
    return finish();
  }

  // textual forms: optional weekday, day/month in either order, clock, year, zone
  std::string cleaned;
  for (char ch : s) cleaned += ch == ',' ? ' ' : ch;
  auto w = words(cleaned);
  std::size_t i = 0;
  if (i < w.size() && is_weekday(w[i])) ++i;
  std::optional<int> month, day, year;
  bool have_clock = false;
  for (; i < w.size(); ++i) {
    const std::string& t = w[i];
    if (auto mo = month_of(t); mo && !month) {
      month = mo;
    } else if (t.find(':') != std::string::npos && !have_clock) {
      if (!parse_clock(t, c)) bad_timestamp(s);
      have_clock = true;
    } else if (all_digits(t) && t.size() <= 2 && !day) {
      day = std::stoi(t);
    } else if (all_digits(t) && t.size() == 4 && !year) {
      year = std::stoi(t);
    } else if (have_clock && !explicit_offset && zone_offset(t)) {
      explicit_offset = zone_offset(t);
    } else {
      bad_timestamp(s);
    }
  }
  if (!month || !day) bad_timestamp(s);
  c.month = *month;
  c.day = *day;
  c.year = year ? *year : (reference_year ? *reference_year : current_year());
  return finish();
}

std::string normalize_hostname(std::string_view raw) {
  std::string s = lower(trim(raw));
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s.empty() || s.size() > 253) throw NormalizeError("invalid hostname: \"" + std::string(raw) + "\"", std::string(raw));
  for (const auto& label : split(s, '.')) {
    bool ok = !label.empty() && label.size() <= 63 && label.front() != '-' && label.back() != '-' &&
              std::all_of(label.begin(), label.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
              });
    if (!ok) throw NormalizeError("invalid hostname: \"" + std::string(raw) + "\"", std::string(raw));
  }
  return s;
}

namespace {

std::optional<FieldType> type_of(const std::string& t) {
  if (t == "text") return FieldType::text;
  if (t == "int" || t == "integer") return FieldType::integer;
  if (t == "real") return FieldType::real;
  if (t == "mac") return FieldType::mac;
  if (t == "timestamp") return FieldType::timestamp;
  if (t == "hostname") return FieldType::hostname;
  return std::nullopt;
}

bool dimension_name_ok(const std::string& d) {
  if (d.empty() || !(std::isalpha(static_cast<unsigned char>(d[0])) || d[0] == '_')) return false;
  if (d.back() == '-') return false;
  return std::all_of(d.begin(), d.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

}  // namespace

Schema parse_schema(std::string_view text) {
  Schema schema;
  int lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("schema line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto w = words(t);
    if (w[0] == "field") {
      // field NAME -> dimension DIM type TYPE
      if (w.size() != 7 || w[2] != "->" || w[3] != "dimension" || w[5] != "type")
        fail("expected `field <name> -> dimension <name> type <type>`");
      auto ty = type_of(w[6]);
      if (!ty) fail("unknown type " + w[6]);
      if (!dimension_name_ok(w[4])) fail("invalid dimension name " + w[4]);
      schema.fields.push_back(FieldRule{w[1], w[4], *ty});
    } else if (w[0] == "source") {
      if (w.size() != 2) fail("expected `source <name>`");
      schema.source = w[1];
    } else if (w[0] == "partial-w") {
      if (w.size() != 2) fail("expected `partial-w <real>`");
      double v = std::strtod(w[1].c_str(), nullptr);
      if (!(v >= 0.0 && v <= 1.0)) fail("partial-w must be within [0,1]");
      schema.partial_w = v;
    } else if (w[0] == "format") {
      if (w.size() < 2) fail("expected `format kv|delimited <sep>|regex <pattern>`");
      schema.format = w[1];
      if (w[1] == "delimited") {
        std::string sep = w.size() > 2 ? w[2] : ",";
        if (sep == "tab") sep = "\t";
        else if (sep == "space" || sep == "whitespace") sep = " ";
        else if (sep == "comma") sep = ",";
        else if (sep == "pipe") sep = "|";
        schema.delimiter = sep;
      } else if (w[1] == "regex") {
        auto p = t.find("regex");
        schema.pattern = trim(t.substr(p + 5));
        if (schema.pattern.empty()) fail("empty regex");
        try {
          std::regex check(schema.pattern);
        } catch (const std::regex_error& e) {
          fail(std::string("bad regex: ") + e.what());
        }
      } else if (w[1] != "kv") {
        fail("unknown format " + w[1]);
      }
    } else {
      fail("unknown directive " + w[0]);
    }
  }
  if (schema.fields.empty()) throw std::invalid_argument("schema declares no fields");
  return schema;
}

namespace {

const std::map<std::string, std::string>& preset_texts() {
  static const std::map<std::string, std::string> p = {
      {"arp",
       "source arp\n"
       "# `arp -an` output: ? (132.205.44.252) at 00:1b:63:b5:f8:0f [ether] on eth0\n"
       "format regex \\((\\S+)\\)\\s+at\\s+(\\S+)\n"
       "field ip -> dimension ipaddr type text\n"
       "field mac -> dimension mac type mac\n"},
      {"dhcp",
       "source dhcp\n"
       "format regex ^(\\w{3}\\s+\\d+\\s+[\\d:]+)\\s+\\S+\\s+dhcpd\\S*:\\s+(DHCP\\w+)\\s+(?:on|for)\\s+(\\S+)\\s+(?:to|from)\\s+(\\S+)(?:\\s+\\((\\S+)\\))?\n"
       "field time -> dimension timestamp type timestamp\n"
       "field event -> dimension event type text\n"
       "field ip -> dimension ipaddr type text\n"
       "field mac -> dimension mac type mac\n"
       "field host -> dimension hostname type hostname\n"},
      {"argus",
       "source argus\n"
       "format delimited ,\n"
       "field start -> dimension flow-start type timestamp\n"
       "field end -> dimension flow-end type timestamp\n"
       "field proto -> dimension protocol type text\n"
       "field smac -> dimension src-mac type mac\n"
       "field dmac -> dimension dst-mac type mac\n"
       "field saddr -> dimension src-ipaddr type text\n"
       "field sport -> dimension src-port type int\n"
       "field dir -> dimension direction type text\n"
       "field daddr -> dimension dst-ipaddr type text\n"
       "field dport -> dimension dst-port type int\n"
       "field pkts -> dimension packets type int\n"
       "field sbytes -> dimension src-bytes type int\n"
       "field dbytes -> dimension dst-bytes type int\n"
       "field state -> dimension state type text\n"},
      {"swm",
       "source swm\n"
       "format delimited whitespace\n"
       "field port -> dimension port type text\n"
       "field state -> dimension port-state type text\n"
       "field mac -> dimension mac type mac\n"
       "field host -> dimension hostname type hostname\n"},
      {"nmap",
       "source nmap\n"
       "# grepable output: Host: 132.205.44.252 (flucid-44.encs.concordia.ca)\tStatus: Up\n"
       "format regex ^Host:\\s+(\\S+)\\s+\\((\\S*)\\)\\s+Status:\\s+(\\w+)\n"
       "field ip -> dimension ipaddr type text\n"
       "field host -> dimension hostname type hostname\n"
       "field status -> dimension status type text\n"},
      {"msw",
       "source msw\n"
       "format kv\n"
       "partial-w 0.5\n"
       "field switch -> dimension switch type text\n"
       "field port -> dimension port type text\n"
       "field mac -> dimension mac type mac\n"
       "field host -> dimension hostname type hostname\n"
       "field time -> dimension t_ar type timestamp\n"},
      {"activity",
       "source activity\n"
       "format delimited |\n"
       "field time -> dimension timestamp type timestamp\n"
       "field user -> dimension user type text\n"
       "field host -> dimension hostname type hostname\n"
       "field action -> dimension action type text\n"},
  };
  return p;
}

std::vector<std::pair<std::string, std::string>> kv_tokens(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0, n = line.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t k = i;
    while (i < n && line[i] != '=' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::string key = line.substr(k, i - k);
    if (i >= n || line[i] != '=') continue;
    ++i;
    std::string val;
    if (i < n && line[i] == '"') {
      ++i;
      while (i < n && line[i] != '"') {
        if (line[i] == '\\' && i + 1 < n) ++i;
        val += line[i++];
      }
      ++i;
    } else {
      while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) val += line[i++];
    }
    out.emplace_back(key, val);
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, p);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

Schema preset(std::string_view name) {
  auto it = preset_texts().find(std::string(name));
  if (it == preset_texts().end()) throw std::invalid_argument("unknown schema preset \"" + std::string(name) + "\"");
  return parse_schema(it->second);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : preset_texts()) out.push_back(k);
  return out;
}

std::vector<Record> extract(const Schema& schema, std::string_view input) {
  std::vector<Record> out;
  std::istringstream in{std::string(input)};
  std::string line;
  std::optional<std::regex> re;
  if (schema.format == "regex") re.emplace(schema.pattern);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    Record r;
    if (schema.format == "kv") {
      auto toks = kv_tokens(line);
      for (const auto& f : schema.fields)
        for (const auto& [k, v] : toks)
          if (k == f.field) {
            r.emplace_back(f.field, v);
            break;
          }
    } else if (schema.format == "delimited") {
      auto cols = schema.delimiter == " " ? words(line) : split(line, schema.delimiter[0]);
      if (cols.size() < schema.fields.size()) continue;
      for (std::size_t i = 0; i < schema.fields.size() && i < cols.size(); ++i) {
        std::string v = trim(cols[i]);
        if (!v.empty()) r.emplace_back(schema.fields[i].field, v);
      }
    } else {
      std::smatch m;
      if (!std::regex_search(line, m, *re)) continue;
      for (std::size_t i = 0; i < schema.fields.size() && i + 1 < m.size(); ++i)
        if (m[i + 1].matched && m[i + 1].length() > 0) r.emplace_back(schema.fields[i].field, m[i + 1].str());
    }
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

EncodeResult encode_log(const std::vector<Record>& lines, const Schema& schema, const std::string& name,
                        const EncodeOptions& options) {
  EncodeResult res;
  std::string zone = options.zone ? *options.zone : default_zone();
  std::int64_t now = options.encoded_at
                         ? *options.encoded_at
                         : std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
  std::ostringstream out;
  out << "// " << schema.source << " evidence, encoded: " << format_timestamp(now, zone) << "\n";
  out << "observation sequence " << name << "_os =\n{\n";
  std::size_t n = std::max<std::size_t>(lines.size(), 1);
  for (std::size_t i = 1; i <= n; ++i) out << "  " << name << "_o_" << i << (i < n ? ",\n" : "\n");
  out << "};\n\n";
  if (lines.empty()) {
    out << "observation " << name << "_o_1 = $;\n";
  }
  std::optional<std::int64_t> last_t;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    double w = 1.0;
    std::optional<Timestamp> t;
    std::string pairs;
    for (const auto& rule : schema.fields) {
      auto it = std::find_if(lines[i].begin(), lines[i].end(), [&](const auto& kv) { return kv.first == rule.field; });
      if (it == lines[i].end()) continue;
      const std::string& raw = it->second;
      std::string tag;
      try {
        switch (rule.type) {
          case FieldType::text: tag = quote(raw); break;
          case FieldType::integer: {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc() || p != raw.data() + raw.size())
              throw NormalizeError("not an integer: \"" + raw + "\"", raw);
            tag = std::to_string(v);
            break;
          }
          case FieldType::real: {
            char* end = nullptr;
            double v = std::strtod(raw.c_str(), &end);
            if (raw.empty() || *end) throw NormalizeError("not a number: \"" + raw + "\"", raw);
            tag = format_real(v);
            break;
          }
          case FieldType::mac: tag = quote(normalize_mac(raw)); break;
          case FieldType::hostname: tag = quote(normalize_hostname(raw)); break;
          case FieldType::timestamp: {
            auto ts = normalize_timestamp(raw, options.reference_year, zone);
            if (!t) t = ts;
            tag = quote(ts.text);
            break;
          }
        }
      } catch (const NormalizeError& e) {
        w = schema.partial_w;
        res.warnings.push_back("record " + std::to_string(i + 1) + ": " + e.what());
        tag = quote(raw);
      }
      if (!pairs.empty()) pairs += ", ";
      pairs += rule.dimension + ":" + tag;
    }
    if (t) {
      if (last_t && t->epoch < *last_t)
        res.warnings.push_back("record " + std::to_string(i + 1) + ": timestamp goes backwards");
      last_t = t->epoch;
    }
    out << "observation " << name << "_o_" << (i + 1) << " = ([" << pairs << "], 1, 0, " << format_real(w);
    if (t) out << ", " << quote(t->text);
    out << ");\n";
  }
  out << "// end of " << schema.source << " evidence\n";
  res.text = out.str();
  return res;
}

std::string output_name(const std::string& case_name, const std::string& source) {
  return case_name + "." + source + ".ctx";
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace flucid::encoders
