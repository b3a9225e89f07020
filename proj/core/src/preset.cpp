#include "tcnfx/preset.hpp"

#include "tcnfx/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace tcnfx {

namespace {

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw Error(ErrorKind::Format, std::string(key), "cannot parse '" + std::string(text) + "'");
  return value;
}

int parse_int(std::string_view key, std::string_view text)
{
  // Parse wide so the range check can report the actual value.
  const auto v = parse_number<long long>(key, text);
  if (v < -2147483647LL || v > 2147483647LL)
    throw Error(ErrorKind::InvalidConfig, std::string(key), "value " + std::string(text) + " out of range");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view text)
{
  if (text == "true" || text == "1")
    return true;
  if (text == "false" || text == "0")
    return false;
  throw Error(ErrorKind::Format, std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::string format_double(double v)
{
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string quote(std::string_view s)
{
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
    case '"': out += "\\\""; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    default: out += ch;
    }
  }
  return out + "\"";
}

std::string unquote(std::string_view key, std::string_view s)
{
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw Error(ErrorKind::Format, std::string(key), "expected a double-quoted string");
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char ch = s[i];
    if (ch == '\\') {
      if (i + 2 >= s.size())
        throw Error(ErrorKind::Format, std::string(key), "dangling escape");
      switch (s[++i]) {
      case '"': ch = '"'; break;
      case '\\': ch = '\\'; break;
      case 'n': ch = '\n'; break;
      case 't': ch = '\t'; break;
      case 'r': ch = '\r'; break;
      default: throw Error(ErrorKind::Format, std::string(key), "unknown escape");
      }
    } else if (ch == '"') {
      throw Error(ErrorKind::Format, std::string(key), "unescaped quote");
    }
    out += ch;
  }
  return out;
}

struct Field {
  std::string_view key;
  std::function<std::string(const Preset&)> get;
  std::function<void(Preset&, std::string_view)> set;
};

const std::vector<Field>& fields()
{
  static const std::vector<Field> table = {
    {"name", [](const Preset& p) { return quote(p.name); },
     [](Preset& p, std::string_view v) { p.name = unquote("name", v); }},
    {"num_layers", [](const Preset& p) { return std::to_string(p.network.num_layers); },
     [](Preset& p, std::string_view v) { p.network.num_layers = parse_int("num_layers", v); }},
    {"kernel_size", [](const Preset& p) { return std::to_string(p.network.kernel_size); },
     [](Preset& p, std::string_view v) { p.network.kernel_size = parse_int("kernel_size", v); }},
    {"dilation_growth", [](const Preset& p) { return std::to_string(p.network.dilation_growth); },
     [](Preset& p, std::string_view v) { p.network.dilation_growth = parse_int("dilation_growth", v); }},
    {"channel_width", [](const Preset& p) { return std::to_string(p.network.channel_width); },
     [](Preset& p, std::string_view v) { p.network.channel_width = parse_int("channel_width", v); }},
    {"in_channels", [](const Preset& p) { return std::to_string(p.network.in_channels); },
     [](Preset& p, std::string_view v) { p.network.in_channels = parse_int("in_channels", v); }},
    {"out_channels", [](const Preset& p) { return std::to_string(p.network.out_channels); },
     [](Preset& p, std::string_view v) { p.network.out_channels = parse_int("out_channels", v); }},
    {"activation", [](const Preset& p) { return std::string(to_string(p.network.activation)); },
     [](Preset& p, std::string_view v) {
       const auto a = parse_activation(v);
       if (!a)
         throw Error(ErrorKind::InvalidConfig, "activation", "unknown activation '" + std::string(v) + "'");
       p.network.activation = *a;
     }},
    {"init", [](const Preset& p) { return std::string(to_string(p.network.init.kind)); },
     [](Preset& p, std::string_view v) {
       const auto k = parse_init_kind(v);
       if (!k)
         throw Error(ErrorKind::InvalidConfig, "init", "unknown init scheme '" + std::string(v) + "'");
       p.network.init.kind = *k;
     }},
    {"init_param", [](const Preset& p) { return format_double(p.network.init.param); },
     [](Preset& p, std::string_view v) { p.network.init.param = parse_number<double>("init_param", v); }},
    {"depthwise", [](const Preset& p) { return std::string(p.network.depthwise ? "true" : "false"); },
     [](Preset& p, std::string_view v) { p.network.depthwise = parse_bool("depthwise", v); }},
    {"use_bias", [](const Preset& p) { return std::string(p.network.use_bias ? "true" : "false"); },
     [](Preset& p, std::string_view v) { p.network.use_bias = parse_bool("use_bias", v); }},
    {"seed", [](const Preset& p) { return std::to_string(p.network.seed); },
     [](Preset& p, std::string_view v) { p.network.seed = parse_number<std::uint64_t>("seed", v); }},
    {"input_gain_db", [](const Preset& p) { return format_double(p.gains.input_db); },
     [](Preset& p, std::string_view v) { p.gains.input_db = parse_number<double>("input_gain_db", v); }},
    {"output_gain_db", [](const Preset& p) { return format_double(p.gains.output_db); },
     [](Preset& p, std::string_view v) { p.gains.output_db = parse_number<double>("output_gain_db", v); }},
    {"mix", [](const Preset& p) { return format_double(p.gains.mix); },
     [](Preset& p, std::string_view v) { p.gains.mix = parse_number<double>("mix", v); }},
    {"dc_blocker", [](const Preset& p) { return std::string(p.dc_blocker ? "true" : "false"); },
     [](Preset& p, std::string_view v) { p.dc_blocker = parse_bool("dc_blocker", v); }},
  };
  return table;
}

const Field* find_field(std::string_view key)
{
  for (const auto& f : fields())
    if (f.key == key)
      return &f;
  return nullptr;
}

} // namespace

void set_preset_field(Preset& preset, std::string_view key, std::string_view value)
{
  const Field* f = find_field(key);
  if (!f)
    throw Error(ErrorKind::UnsupportedVersion, std::string(key),
                "unknown key for preset version " + std::to_string(kPresetVersion));
  f->set(preset, trim(value));
}

std::vector<std::string_view> preset_field_keys()
{
  std::vector<std::string_view> keys;
  for (const auto& f : fields())
    keys.push_back(f.key);
  return keys;
}

void Preset::validate() const
{
  if (version != kPresetVersion)
    throw Error(ErrorKind::UnsupportedVersion, "version",
                "preset version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kPresetVersion) + ")");
  network.validate();
  gains.validate();
}

std::string serialize_preset(const Preset& preset)
{
  preset.validate();
  std::ostringstream out;
  out << "version = " << preset.version << '\n';
  for (const auto& f : fields())
    out << f.key << " = " << f.get(preset) << '\n';
  return out.str();
}

Preset parse_preset(std::string_view text)
{
  Preset preset;
  std::set<std::string, std::less<>> seen;
  bool have_version = false;
  std::size_t line_no = 0;
  std::vector<std::pair<std::string, std::string>> entries;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!seen.insert(key).second)
      throw Error(ErrorKind::Format, key, "duplicate key");
    if (key == "version") {
      preset.version = parse_int("version", value);
      have_version = true;
    } else {
      entries.emplace_back(key, value);
    }
  }

  // The version decides which keys are legal, so it is checked first.
  if (!have_version)
    throw Error(ErrorKind::Format, "version", "missing required key");
  if (preset.version != kPresetVersion)
    throw Error(ErrorKind::UnsupportedVersion, "version",
                "preset version " + std::to_string(preset.version) + " is not supported (expected " +
                  std::to_string(kPresetVersion) + ")");

  for (const auto& [key, value] : entries) {
    const Field* f = find_field(key);
    if (!f)
      throw Error(ErrorKind::UnsupportedVersion, key,
                  "unknown key for preset version " + std::to_string(kPresetVersion));
    f->set(preset, value);
  }
  for (const auto& f : fields())
    if (!seen.contains(f.key))
      throw Error(ErrorKind::Format, std::string(f.key), "missing required key");

  preset.validate();
  return preset;
}

Preset load_preset(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "path", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_preset(ss.str());
}

void save_preset(const std::filesystem::path& path, const Preset& preset)
{
  const std::string text = serialize_preset(preset);
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Io, "path", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out)
    throw Error(ErrorKind::Io, "path", "write failed for " + path.string());
}

} // namespace tcnfx
